//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include "frad/pes.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <deque>
#include <cmath>

#include "frad/errors.hpp"
#include "frad/geometry.hpp"

namespace frad {

namespace {

constexpr double kDegenerateSin = 1e-8;

struct AngleGeom {
  double theta = 0.0;
  Eigen::Vector3d grad_a, grad_b, grad_c;
  bool degenerate = false;
};

AngleGeom angle_geometry(const Conformation& x, int a, int b, int c) {
  AngleGeom g;
  const Eigen::Vector3d u = x.position(a) - x.position(b);
  const Eigen::Vector3d v = x.position(c) - x.position(b);
  const double nu = u.norm(), nv = v.norm();
  if (nu < 1e-12 || nv < 1e-12) {
    g.degenerate = true;
    return g;
  }
  const double cosv = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
  const double sinv = std::sqrt(std::max(0.0, 1.0 - cosv * cosv));
  if (sinv < kDegenerateSin) {
    g.degenerate = true;
    return g;
  }
  g.theta = std::acos(cosv);
  g.grad_a = (cosv * u / nu - v / nv) / (nu * sinv);
  g.grad_c = (cosv * v / nv - u / nu) / (nv * sinv);
  g.grad_b = -(g.grad_a + g.grad_c);
  return g;
}

struct TorsionGeom {
  double psi = 0.0;
  Eigen::Vector3d grad_a, grad_b, grad_c, grad_d;
  bool degenerate = false;
};

TorsionGeom torsion_geometry(const Conformation& x, int a, int b, int c,
                             int d) {
  TorsionGeom g;
  const Eigen::Vector3d b1 = x.position(b) - x.position(a);
  const Eigen::Vector3d b2 = x.position(c) - x.position(b);
  const Eigen::Vector3d b3 = x.position(d) - x.position(c);
  const Eigen::Vector3d n1 = b1.cross(b2);
  const Eigen::Vector3d n2 = b2.cross(b3);
  const double n1sq = n1.squaredNorm(), n2sq = n2.squaredNorm();
  const double b2n = b2.norm();
  if (n1.norm() <= kDegenerateSin * b1.norm() * b2n ||
      n2.norm() <= kDegenerateSin * b2n * b3.norm() || b2n < 1e-12) {
    g.degenerate = true;
    return g;
  }
  g.psi = std::atan2(n1.cross(n2).dot(b2 / b2n), n1.dot(n2));
  g.grad_a = -(b2n / n1sq) * n1;
  g.grad_d = (b2n / n2sq) * n2;
  const double f1 = b1.dot(b2) / (b2n * b2n);
  const double f2 = b3.dot(b2) / (b2n * b2n);
  g.grad_b = -(1.0 + f1) * g.grad_a + f2 * g.grad_d;
  g.grad_c = -(g.grad_a + g.grad_b + g.grad_d);
  return g;
}

}  // namespace

EnergyBreakdown energy_detail(const ForceField& field, const Conformation& x) {
  EnergyBreakdown out;
  for (const BondTerm& t : field.bonds) {
    const double dr = measure_distance(x, t.i, t.j) - t.r0;
    out.value += t.k * dr * dr;
  }
  for (const AngleTerm& t : field.angles) {
    const AngleGeom g = angle_geometry(x, t.a, t.b, t.c);
    if (g.degenerate) {
      ++out.skipped_terms;
      continue;
    }
    const double dth = g.theta - t.theta0;
    out.value += t.k * dth * dth;
  }
  for (const TorsionTerm& t : field.torsions) {
    const TorsionGeom g = torsion_geometry(x, t.a, t.b, t.c, t.d);
    if (g.degenerate) {
      ++out.skipped_terms;
      continue;
    }
    out.value += t.v * (1.0 + std::cos(t.n * g.psi - t.gamma));
  }
  return out;
}

double energy(const ForceField& field, const Conformation& x) {
  return energy_detail(field, x).value;
}

Eigen::VectorXd forces(const ForceField& field, const Conformation& x) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.coords.size());
  const auto add = [&grad](int atom, const Eigen::Vector3d& g) {
    grad.segment<3>(3 * atom) += g;
  };
  for (const BondTerm& t : field.bonds) {
    const Eigen::Vector3d diff = x.position(t.j) - x.position(t.i);
    const double r = diff.norm();
    if (r < 1e-12) continue;
    const Eigen::Vector3d u = diff / r;
    const double scale = 2.0 * t.k * (r - t.r0);
    add(t.j, scale * u);
    add(t.i, -scale * u);
  }
  for (const AngleTerm& t : field.angles) {
    const AngleGeom g = angle_geometry(x, t.a, t.b, t.c);
    if (g.degenerate) continue;
    const double scale = 2.0 * t.k * (g.theta - t.theta0);
    add(t.a, scale * g.grad_a);
    add(t.b, scale * g.grad_b);
    add(t.c, scale * g.grad_c);
  }
  for (const TorsionTerm& t : field.torsions) {
    const TorsionGeom g = torsion_geometry(x, t.a, t.b, t.c, t.d);
    if (g.degenerate) continue;
    const double scale = -t.v * t.n * std::sin(t.n * g.psi - t.gamma);
    add(t.a, scale * g.grad_a);
    add(t.b, scale * g.grad_b);
    add(t.c, scale * g.grad_c);
    add(t.d, scale * g.grad_d);
  }
  return -grad;
}

Eigen::VectorXd boltzmann_score(const ForceField& field,
                                const Conformation& x) {
  return forces(field, x) / field.kT;
}

MinimizeResult minimize(const ForceField& field, const Conformation& start,
                        const MinimizeOptions& opts) {
  MinimizeResult result;
  result.x = start;
  if (!start.coords.allFinite()) {
    throw DataError("minimize: non-finite start conformation");
  }

  double e = energy(field, result.x);
  Eigen::VectorXd grad = -forces(field, result.x);
  Eigen::VectorXd prev_x, prev_grad;
  double step = 1.0 / std::max(1.0, grad.norm());
  std::deque<double> window{e};

  for (result.iterations = 0; result.iterations < opts.max_iterations;
       ++result.iterations) {
    result.grad_inf_norm = grad.cwiseAbs().maxCoeff();
    if (result.grad_inf_norm < opts.grad_tol) {
      result.converged = true;
      break;
    }
    // Barzilai-Borwein trial step length; Armijo backtracking still decides
    // acceptance, so descent is monotone.
    if (prev_x.size() > 0) {
      const Eigen::VectorXd s = result.x.coords - prev_x;
      const Eigen::VectorXd y = grad - prev_grad;
      const double sy = s.dot(y);
      if (sy > 1e-300) step = std::clamp(s.squaredNorm() / sy, 1e-12, 1e3);
    }
    const double gsq = grad.squaredNorm();
    const double e_ref = *std::max_element(window.begin(), window.end());
    double alpha = step;
    Conformation trial = result.x;
    double e_trial = 0.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      trial.coords = result.x.coords - alpha * grad;
      e_trial = energy(field, trial);
      if (e_trial <= e_ref - opts.armijo_c * alpha * gsq) {
        accepted = true;
        break;
      }
      alpha *= opts.shrink;
    }
    if (!accepted) break;  // line search stalled at float resolution
    prev_x = result.x.coords;
    prev_grad = grad;
    result.x = trial;
    e = e_trial;
    window.push_back(e);
    while (static_cast<int>(window.size()) > std::max(1, opts.nonmonotone_window)) {
      window.pop_front();
    }
    grad = -forces(field, result.x);
  }
  result.grad_inf_norm = (-forces(field, result.x)).cwiseAbs().maxCoeff();
  result.converged = result.grad_inf_norm < opts.grad_tol;
  result.energy = e;
  return result;
}

}  // namespace frad
