//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include "frad/linearize.hpp"

#include <Eigen/Geometry>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "frad/errors.hpp"

namespace frad {

namespace {

constexpr double kTikhonov = 1e-10;

void fill_rotation_column(Eigen::MatrixXd& C, int col,
                          const Conformation& x_eq, int atom_b, int atom_c,
                          const std::vector<int>& moving) {
  const Eigen::Vector3d pb = x_eq.position(atom_b);
  const Eigen::Vector3d axis = x_eq.position(atom_c) - pb;
  const double len = axis.norm();
  if (len < 1e-12) throw GeometryError("zero-length axis in C column");
  const Eigen::Vector3d u = axis / len;
  for (int a : moving) {
    if (a == atom_c) continue;  // on the axis, exactly zero
    C.block<3, 1>(3 * a, col) = u.cross(x_eq.position(a) - pb);
  }
}

}  // namespace

std::vector<int> LinearMap::key_atom_row_order() const {
  const int n_atoms = rows() / 3;
  std::vector<int> order;
  std::vector<char> used(n_atoms, 0);
  for (int k : key_atoms) {
    order.push_back(k);
    used[k] = 1;
  }
  for (int a = 0; a < n_atoms; ++a) {
    if (!used[a]) order.push_back(a);
  }
  return order;
}

Eigen::MatrixXd LinearMap::key_atom_permuted() const {
  const auto order = key_atom_row_order();
  Eigen::MatrixXd P(C.rows(), C.cols());
  for (size_t r = 0; r < order.size(); ++r) {
    P.middleRows(3 * r, 3) = C.middleRows(3 * order[r], 3);
  }
  return P;
}

LinearMap analytic_c_rn(const Molecule& molecule, const Conformation& x_eq) {
  const int n = molecule.atom_count();
  const auto& rotatable = molecule.rotatable();
  LinearMap map;
  map.method = CMethod::Analytic;
  map.m = static_cast<int>(rotatable.size());
  map.C = Eigen::MatrixXd::Zero(3 * n, map.m);
  for (int j = 0; j < map.m; ++j) {
    const RotatableBond& rb = rotatable[j];
    fill_rotation_column(map.C, j, x_eq, rb.b, rb.c, rb.moving_set);
    map.key_atoms.push_back(rb.key_atom);
  }
  return map;
}

LinearMap analytic_c_vrn(const Molecule& molecule, const Conformation& x_eq,
                         const InternalCoords& ic) {
  const int n = molecule.atom_count();
  LinearMap map;
  map.method = CMethod::Analytic;
  map.m1 = ic.m1();
  map.m2 = ic.m2();
  map.m3 = ic.m3();
  map.m = ic.m();
  map.C = Eigen::MatrixXd::Zero(3 * n, ic.total());

  int col = 0;
  for (const auto& entry : ic.bond_lengths) {
    const Eigen::Vector3d axis =
        x_eq.position(entry.j) - x_eq.position(entry.i);
    const double len = axis.norm();
    if (len < 1e-12) throw GeometryError("zero-length bond in C column");
    const Eigen::Vector3d u = axis / len;
    for (int a : split_subtree(molecule, entry.i, entry.j)) {
      map.C.block<3, 1>(3 * a, col) = u;
    }
    ++col;
  }
  for (const auto& entry : ic.angles) {
    const Eigen::Vector3d pb = x_eq.position(entry.b);
    const Eigen::Vector3d normal =
        (x_eq.position(entry.a) - pb).cross(x_eq.position(entry.c) - pb);
    const double len = normal.norm();
    if (len < 1e-12) throw GeometryError("degenerate angle in C column");
    const Eigen::Vector3d u = normal / len;
    for (int a : split_subtree(molecule, entry.b, entry.c)) {
      map.C.block<3, 1>(3 * a, col) = u.cross(x_eq.position(a) - pb);
    }
    ++col;
  }
  for (const auto& entry : ic.torsions_fixed) {
    fill_rotation_column(map.C, col, x_eq, entry.b, entry.c,
                         split_subtree(molecule, entry.b, entry.c));
    ++col;
  }
  for (size_t j = 0; j < ic.torsions_rot.size(); ++j) {
    const RotatableBond& rb = molecule.rotatable()[j];
    fill_rotation_column(map.C, col, x_eq, rb.b, rb.c, rb.moving_set);
    map.key_atoms.push_back(rb.key_atom);
    ++col;
  }
  return map;
}

LinearMap lstsq_c(const Molecule& molecule, const Conformation& x_eq,
                  NoiseKind kind, double probe_scale, int n_samples,
                  Rng& rng) {
  if (probe_scale <= 0.0) throw ConfigError("probe_scale must be positive");

  InternalCoordsOptions opts;
  opts.throw_on_degenerate = false;
  const InternalCoords ic = internal_coords(molecule, x_eq, opts);
  const int M = kind == NoiseKind::RN ? ic.m() : ic.total();
  if (n_samples < M) {
    throw ConfigError("least-squares C needs at least M = " +
                      std::to_string(M) + " samples");
  }

  const int dim = 3 * molecule.atom_count();
  Eigen::MatrixXd D(M, n_samples);
  Eigen::MatrixXd X(dim, n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd delta(M);
    for (int i = 0; i < M; ++i) delta[i] = rng.normal(0.0, probe_scale);
    const Conformation moved =
        kind == NoiseKind::RN
            ? apply_rotations(molecule, x_eq, delta)
            : apply_internal_delta(molecule, x_eq, ic, delta);
    D.col(s) = delta;
    X.col(s) = moved.coords - x_eq.coords;
  }

  Eigen::MatrixXd gram = D * D.transpose();
  gram.diagonal().array() += kTikhonov;

  LinearMap map;
  map.method = CMethod::LeastSquares;
  if (kind == NoiseKind::RN) {
    map.m = M;
  } else {
    map.m1 = ic.m1();
    map.m2 = ic.m2();
    map.m3 = ic.m3();
    map.m = ic.m();
  }
  for (const RotatableBond& rb : molecule.rotatable()) {
    map.key_atoms.push_back(rb.key_atom);
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double cond =
      eig.eigenvalues()(M - 1) / std::max(eig.eigenvalues()(0), 1e-300);
  map.ill_conditioned = cond > 1e12;

  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  map.C = llt.solve(D * X.transpose()).transpose();
  return map;
}

double rotation_linearization_error(double dpsi) {
  return dpsi * dpsi - 2.0 * dpsi * std::sin(dpsi) - 2.0 * std::cos(dpsi) +
         2.0;
}

LinearizationReport linearization_bound_check(const Molecule& molecule,
                                              const Conformation& x_eq,
                                              const Eigen::VectorXd& dpsi) {
  if (!dpsi.allFinite()) throw DataError("non-finite torsion displacement");
  const LinearMap map = analytic_c_rn(molecule, x_eq);
  LinearizationReport report;
  report.d_sq = map.C.colwise().squaredNorm();

  const Conformation moved = apply_rotations(molecule, x_eq, dpsi);
  const Eigen::VectorXd dx = moved.coords - x_eq.coords;
  const Eigen::VectorXd residual = dx - map.C * dpsi;
  report.residual_sq = residual.squaredNorm();
  report.bound = 0.0;
  for (int j = 0; j < dpsi.size(); ++j) {
    report.bound += report.d_sq[j] * rotation_linearization_error(dpsi[j]);
  }
  const double dx_norm = dx.norm();
  report.c_error = dx_norm == 0.0 ? 0.0 : residual.norm() / dx_norm;
  return report;
}

double c_error(const Eigen::MatrixXd& C, const Eigen::MatrixXd& deltas,
               const Eigen::MatrixXd& dxs) {
  if (deltas.cols() != dxs.cols()) {
    throw DataError("c_error: batch size mismatch");
  }
  const double dx_norm = dxs.norm();
  if (dx_norm == 0.0) {
    throw NumericalError("c_error undefined: zero displacement batch");
  }
  return (dxs - C * deltas).norm() / dx_norm;
}

Eigen::VectorXd noise_sigma_sq_diag(const NoiseSpec& spec,
                                    const InternalCoords& ic) {
  if (spec.kind == NoiseKind::CgnOnly) return Eigen::VectorXd(0);
  if (spec.kind == NoiseKind::RN) {
    return Eigen::VectorXd::Constant(ic.m(), spec.sigma * spec.sigma);
  }
  Eigen::VectorXd diag(ic.total());
  int at = 0;
  for (int i = 0; i < ic.m1(); ++i) diag[at++] = spec.sigma_r * spec.sigma_r;
  for (int i = 0; i < ic.m2(); ++i) {
    diag[at++] = spec.sigma_theta * spec.sigma_theta;
  }
  for (int i = 0; i < ic.m3(); ++i) {
    diag[at++] = spec.sigma_phi * spec.sigma_phi;
  }
  for (int i = 0; i < ic.m(); ++i) diag[at++] = spec.sigma_psi * spec.sigma_psi;
  return diag;
}

ScoreTarget score_target(ScoreKind kind, const Eigen::VectorXd& x_query,
                         const Eigen::VectorXd& x_ref,
                         const Eigen::MatrixXd& C,
                         const Eigen::VectorXd& sigma_sq_diag, double tau) {
  if (x_query.size() != x_ref.size()) {
    throw DataError("score_target: dimension mismatch");
  }
  const Eigen::VectorXd displacement = x_query - x_ref;

  ScoreTarget out;
  out.covariance_used = kind;

  if (kind == ScoreKind::Cgn) {
    if (tau <= 0.0) {
      throw NumericalError("CGN score undefined for tau <= 0");
    }
    out.target = -displacement / (tau * tau);
    return out;
  }

  if (C.rows() != x_query.size() || C.cols() != sigma_sq_diag.size()) {
    throw DataError("score_target: C / Sigma shape mismatch");
  }
  const Eigen::MatrixXd gamma1 =
      C * sigma_sq_diag.asDiagonal() * C.transpose();

  if (kind == ScoreKind::Hybrid && tau > 0.0) {
    Eigen::MatrixXd gamma2 = gamma1;
    gamma2.diagonal().array() += tau * tau;
    const Eigen::LLT<Eigen::MatrixXd> llt(gamma2);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Gamma2 factorization failed");
    }
    out.target = llt.solve(-displacement);
    return out;
  }

  // CAN, or Hybrid falling back at tau = 0. Gamma1 is rank-deficient by
  // construction; eigenvalues below 1e-10 * max are treated as zero.
  out.fell_back_to_can = kind == ScoreKind::Hybrid;
  out.covariance_used = ScoreKind::Can;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma1);
  const double lambda_max =
      std::max(eig.eigenvalues().maxCoeff(), 0.0);
  out.pinv_tolerance = 1e-10 * lambda_max;
  Eigen::VectorXd inv = eig.eigenvalues();
  for (int i = 0; i < inv.size(); ++i) {
    inv[i] = inv[i] > out.pinv_tolerance ? 1.0 / inv[i] : 0.0;
  }
  out.target = -(eig.eigenvectors() *
                 (inv.asDiagonal() *
                  (eig.eigenvectors().transpose() * displacement)));
  return out;
}

ForceAccuracy force_accuracy(const std::vector<Eigen::VectorXd>& estimates,
                             const std::vector<Eigen::VectorXd>& oracle) {
  if (estimates.size() != oracle.size() || estimates.empty()) {
    throw DataError("force_accuracy: batch mismatch or empty");
  }
  Eigen::Index total = 0;
  for (const auto& v : estimates) total += v.size();
  Eigen::VectorXd x(total), y(total);
  Eigen::Index at = 0;
  double cosine_sum = 0.0;
  int cosine_count = 0;
  for (size_t s = 0; s < estimates.size(); ++s) {
    if (estimates[s].size() != oracle[s].size()) {
      throw DataError("force_accuracy: sample dimension mismatch");
    }
    x.segment(at, estimates[s].size()) = estimates[s];
    y.segment(at, oracle[s].size()) = oracle[s];
    at += estimates[s].size();
    const double nx = estimates[s].norm(), ny = oracle[s].norm();
    if (nx > 0.0 && ny > 0.0) {
      cosine_sum += estimates[s].dot(oracle[s]) / (nx * ny);
      ++cosine_count;
    }
  }
  const double mx = x.mean(), my = y.mean();
  const Eigen::VectorXd cx = x.array() - mx;
  const Eigen::VectorXd cy = y.array() - my;
  const double vx = cx.squaredNorm(), vy = cy.squaredNorm();
  if (vx == 0.0 || vy == 0.0) {
    throw NumericalError("correlation undefined: zero-variance input");
  }
  ForceAccuracy fa;
  fa.pearson = cx.dot(cy) / std::sqrt(vx * vy);
  fa.cosine_mean = cosine_count == 0 ? 0.0 : cosine_sum / cosine_count;
  return fa;
}

}  // namespace frad
