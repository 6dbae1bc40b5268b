//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include "frad/geometry.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frad/errors.hpp"

namespace frad {

namespace {

constexpr double kDegenerateSin = 1e-8;

std::string tuple_name(int a, int b, int c, int d) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ", " +
         std::to_string(c) + ", " + std::to_string(d) + ")";
}

/// sin of the angle at b in (a, b, c); 0 for coincident points.
double hinge_sin(const Conformation& conf, int a, int b, int c) {
  const Eigen::Vector3d u = conf.position(a) - conf.position(b);
  const Eigen::Vector3d v = conf.position(c) - conf.position(b);
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.cross(v).norm() / (nu * nv);
}

void rotate_set(Conformation& conf, const std::vector<int>& atoms,
                const Eigen::Vector3d& origin, const Eigen::Vector3d& axis,
                double angle, int skip_atom = -1) {
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  for (int a : atoms) {
    if (a == skip_atom) continue;  // lies on the axis, exactly fixed
    conf.set_position(a, origin + rot * (conf.position(a) - origin));
  }
}

void translate_set(Conformation& conf, const std::vector<int>& atoms,
                   const Eigen::Vector3d& shift) {
  for (int a : atoms) conf.set_position(a, conf.position(a) + shift);
}

}  // namespace

double measure_distance(const Conformation& conf, int i, int j) {
  return (conf.position(i) - conf.position(j)).norm();
}

double measure_angle(const Conformation& conf, int a, int b, int c) {
  const Eigen::Vector3d u = conf.position(a) - conf.position(b);
  const Eigen::Vector3d v = conf.position(c) - conf.position(b);
  const double denom = u.norm() * v.norm();
  if (denom == 0.0) throw GeometryError("angle with coincident atoms");
  const double cosv = std::clamp(u.dot(v) / denom, -1.0, 1.0);
  return std::acos(cosv);
}

double measure_torsion(const Conformation& conf, int a, int b, int c, int d) {
  const Eigen::Vector3d b1 = conf.position(b) - conf.position(a);
  const Eigen::Vector3d b2 = conf.position(c) - conf.position(b);
  const Eigen::Vector3d b3 = conf.position(d) - conf.position(c);
  const Eigen::Vector3d n1 = b1.cross(b2);
  const Eigen::Vector3d n2 = b2.cross(b3);
  const double b2n = b2.norm();
  if (n1.norm() <= kDegenerateSin * b1.norm() * b2n ||
      n2.norm() <= kDegenerateSin * b2n * b3.norm()) {
    throw GeometryError("degenerate torsion " + tuple_name(a, b, c, d) +
                        ": collinear hinge");
  }
  const double y = n1.cross(n2).dot(b2 / b2n);
  const double x = n1.dot(n2);
  double psi = std::atan2(y, x);
  if (psi >= M_PI) psi -= 2.0 * M_PI;  // map to [-pi, pi)
  return psi;
}

InternalCoords internal_coords(const Molecule& molecule,
                               const Conformation& conf,
                               const InternalCoordsOptions& opts) {
  const int n = molecule.atom_count();
  const TreeOrder order = bfs_tree_order(molecule);
  InternalCoords ic;

  // Non-ring bonds in traversal order.
  std::vector<std::pair<int, int>> ranked;
  for (int k = 0; k < molecule.bond_count(); ++k) {
    if (order.rank[k] >= 0) ranked.push_back({order.rank[k], k});
  }
  std::sort(ranked.begin(), ranked.end());
  for (const auto& [rank, k] : ranked) {
    const auto [p, ch] = order.parent_child[k];
    ic.bond_lengths.push_back({p, ch, measure_distance(conf, p, ch)});
  }

  // Angles: designated edge per hinge, only tuples whose moved bond (b, c)
  // is non-ring. Near-linear tuples are unusable for noise (no rotation
  // axis) and are skipped with a counter.
  std::vector<std::tuple<int, int, int, int>> angle_entries;  // rank,a,b,c
  for (int b = 0; b < n; ++b) {
    const auto& nbrs = molecule.neighbors(b);
    if (nbrs.size() < 2) continue;
    int designated = nbrs[0];
    if (opts.randomize_designated_edge && opts.rng != nullptr) {
      designated = nbrs[opts.rng->uniform_int(0, static_cast<int>(nbrs.size()) - 1)];
    }
    for (int c : nbrs) {
      if (c == designated) continue;
      const int moved_bond = molecule.bond_index(b, c);
      if (molecule.is_ring_bond(moved_bond)) continue;
      angle_entries.push_back({order.rank[moved_bond], designated, b, c});
    }
  }
  std::sort(angle_entries.begin(), angle_entries.end());
  for (const auto& [rank, a, b, c] : angle_entries) {
    if (hinge_sin(conf, a, b, c) < kDegenerateSin) {
      ++ic.skipped_degenerate;
      continue;
    }
    ic.angles.push_back({a, b, c, measure_angle(conf, a, b, c)});
  }

  // Torsions: one measured tuple per non-ring bond with both endpoints
  // non-terminal. Order-1 bonds are the rotatable set; higher orders are
  // the fixed set.
  for (const auto& [rank, k] : ranked) {
    const Bond& bond = molecule.bonds()[k];
    const auto [b, c] = order.parent_child[k];
    if (molecule.neighbors(b).size() < 2 || molecule.neighbors(c).size() < 2) {
      continue;
    }
    if (bond.order == 1) continue;  // handled via the rotatable list below

    int ref_a = -1, ref_d = -1;
    for (int nbr : molecule.neighbors(b)) {
      if (nbr != c) {
        ref_a = nbr;
        break;
      }
    }
    for (int nbr : molecule.neighbors(c)) {
      if (nbr != b) {
        ref_d = nbr;
        break;
      }
    }
    double value = std::numeric_limits<double>::quiet_NaN();
    if (hinge_sin(conf, ref_a, b, c) < kDegenerateSin ||
        hinge_sin(conf, b, c, ref_d) < kDegenerateSin) {
      if (opts.throw_on_degenerate) {
        throw GeometryError("degenerate torsion " +
                            tuple_name(ref_a, b, c, ref_d) +
                            ": collinear hinge");
      }
      ++ic.skipped_degenerate;
    } else {
      value = measure_torsion(conf, ref_a, b, c, ref_d);
    }
    ic.torsions_fixed.push_back({ref_a, b, c, ref_d, value});
  }

  for (const RotatableBond& rb : molecule.rotatable()) {
    double value = std::numeric_limits<double>::quiet_NaN();
    if (hinge_sin(conf, rb.ref_a, rb.b, rb.c) < kDegenerateSin ||
        hinge_sin(conf, rb.b, rb.c, rb.ref_d) < kDegenerateSin) {
      if (opts.throw_on_degenerate) {
        throw GeometryError("degenerate torsion " +
                            tuple_name(rb.ref_a, rb.b, rb.c, rb.ref_d) +
                            ": collinear hinge");
      }
      ++ic.skipped_degenerate;
    } else {
      value = measure_torsion(conf, rb.ref_a, rb.b, rb.c, rb.ref_d);
    }
    ic.torsions_rot.push_back({rb.ref_a, rb.b, rb.c, rb.ref_d, value});
  }

  if (ic.total() > 3 * n) {
    throw TopologyError("internal coordinate count exceeds 3N");
  }
  return ic;
}

Conformation rotate_torsion(const Conformation& conf,
                            const RotatableBond& bond, double dpsi) {
  if (dpsi == 0.0) return conf;
  const Eigen::Vector3d pb = conf.position(bond.b);
  const Eigen::Vector3d pc = conf.position(bond.c);
  const Eigen::Vector3d axis = pc - pb;
  const double len = axis.norm();
  if (len < 1e-12) throw GeometryError("zero-length torsion axis");
  Conformation out = conf;
  rotate_set(out, bond.moving_set, pb, axis / len, dpsi, bond.c);
  return out;
}

PerturbationRecord apply_can(const Molecule& molecule, const Conformation& x_eq,
                             const NoiseSpec& spec, Rng& rng) {
  PerturbationRecord rec;
  rec.x_eq = x_eq;
  rec.x_med = x_eq;

  if (spec.kind == NoiseKind::CgnOnly) {
    rec.delta_internal.resize(0);
    return rec;
  }

  if (spec.kind == NoiseKind::RN) {
    const int m = static_cast<int>(molecule.rotatable().size());
    rec.delta_internal.resize(m);
    for (int j = 0; j < m; ++j) {
      rec.delta_internal[j] = rng.normal(0.0, spec.sigma);
    }
    rec.x_med = apply_rotations(molecule, x_eq, rec.delta_internal);
    return rec;
  }

  // VRN: draw every block up front, then apply. Internal moves do not
  // commute in Cartesian space, so the fixed order is part of the
  // definition.
  InternalCoordsOptions opts;
  opts.throw_on_degenerate = false;
  const InternalCoords ic = internal_coords(molecule, x_eq, opts);
  rec.skipped_degenerate = ic.skipped_degenerate;

  rec.delta_internal.resize(ic.total());
  int at = 0;
  for (int i = 0; i < ic.m1(); ++i) {
    rec.delta_internal[at++] = rng.normal(0.0, spec.sigma_r);
  }
  for (int i = 0; i < ic.m2(); ++i) {
    rec.delta_internal[at++] = rng.normal(0.0, spec.sigma_theta);
  }
  for (int i = 0; i < ic.m3(); ++i) {
    rec.delta_internal[at++] = rng.normal(0.0, spec.sigma_phi);
  }
  for (int i = 0; i < ic.m(); ++i) {
    rec.delta_internal[at++] = rng.normal(0.0, spec.sigma_psi);
  }

  rec.x_med = apply_internal_delta(molecule, x_eq, ic, rec.delta_internal);
  return rec;
}

Conformation apply_rotations(const Molecule& molecule,
                             const Conformation& start,
                             const Eigen::VectorXd& dpsi) {
  const auto& rotatable = molecule.rotatable();
  if (dpsi.size() != static_cast<Eigen::Index>(rotatable.size())) {
    throw DataError("rotation delta size mismatch");
  }
  Conformation work = start;
  for (size_t j = 0; j < rotatable.size(); ++j) {
    work = rotate_torsion(work, rotatable[j], dpsi[j]);
  }
  return work;
}

Conformation apply_internal_delta(const Molecule& molecule,
                                  const Conformation& start,
                                  const InternalCoords& ic,
                                  const Eigen::VectorXd& delta) {
  if (delta.size() != ic.total()) {
    throw DataError("internal delta size mismatch");
  }
  Conformation work = start;
  int at = 0;
  for (const auto& entry : ic.bond_lengths) {
    const double dr = delta[at++];
    if (dr == 0.0) continue;
    const Eigen::Vector3d pi = work.position(entry.i);
    const Eigen::Vector3d pj = work.position(entry.j);
    const double len = (pj - pi).norm();
    if (len < 1e-12) {
      throw GeometryError(
          "degenerate bond length mid-application; state discarded");
    }
    translate_set(work, split_subtree(molecule, entry.i, entry.j),
                  (pj - pi) / len * dr);
  }
  for (const auto& entry : ic.angles) {
    const double dtheta = delta[at++];
    if (dtheta == 0.0) continue;
    const Eigen::Vector3d pa = work.position(entry.a);
    const Eigen::Vector3d pb = work.position(entry.b);
    const Eigen::Vector3d pc = work.position(entry.c);
    const Eigen::Vector3d normal = (pa - pb).cross(pc - pb);
    if (normal.norm() < 1e-12) {
      throw GeometryError("degenerate angle mid-application; state discarded");
    }
    rotate_set(work, split_subtree(molecule, entry.b, entry.c), pb,
               normal.normalized(), dtheta);
  }
  for (const auto& entry : ic.torsions_fixed) {
    const double dphi = delta[at++];
    if (dphi == 0.0) continue;
    const Eigen::Vector3d pb = work.position(entry.b);
    const Eigen::Vector3d pc = work.position(entry.c);
    const Eigen::Vector3d axis = pc - pb;
    if (axis.norm() < 1e-12) {
      throw GeometryError(
          "degenerate torsion axis mid-application; state discarded");
    }
    rotate_set(work, split_subtree(molecule, entry.b, entry.c), pb,
               axis.normalized(), dphi, entry.c);
  }
  for (size_t j = 0; j < ic.torsions_rot.size(); ++j) {
    work = rotate_torsion(work, molecule.rotatable()[j], delta[at++]);
  }
  return work;
}

std::pair<Conformation, Eigen::VectorXd> apply_cgn(const Conformation& x_med,
                                                   double tau, Rng& rng) {
  if (tau < 0.0) throw ConfigError("CGN std must be non-negative");
  Eigen::VectorXd delta(x_med.coords.size());
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    delta[i] = tau == 0.0 ? 0.0 : rng.normal(0.0, tau);
  }
  Conformation out = x_med;
  out.coords += delta;
  return {std::move(out), std::move(delta)};
}

PerturbationRecord perturb(const Molecule& molecule, const Conformation& x_eq,
                           const NoiseSpec& spec, Rng& rng) {
  PerturbationRecord rec = apply_can(molecule, x_eq, spec, rng);
  auto [x_fin, delta] = apply_cgn(rec.x_med, spec.tau, rng);
  rec.x_fin = std::move(x_fin);
  rec.delta_cgn = std::move(delta);
  return rec;
}

double perturbation_scale(const Conformation& x_eq, const Conformation& x_fin) {
  if (x_eq.coords.size() != x_fin.coords.size()) {
    throw DataError("perturbation_scale: dimension mismatch");
  }
  const int n = x_eq.atom_count();
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    total += (x_fin.position(a) - x_eq.position(a)).norm();
  }
  return n == 0 ? 0.0 : total / n;
}

}  // namespace frad
