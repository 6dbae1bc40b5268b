//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_LINEARIZE_HPP
#define FRAD_LINEARIZE_HPP

#include <Eigen/Core>
#include <vector>

#include "frad/geometry.hpp"
#include "frad/molgraph.hpp"
#include "frad/rng.hpp"

namespace frad {

enum class CMethod { Analytic, LeastSquares };

/// The differential of the internal-to-Cartesian map at a reference
/// conformation: Delta x ~= C * Delta d. Rows are atom-major (natural
/// order); key_atom_permuted() gives the key-atom-first arrangement in
/// which C is block lower-triangular for rotation noise.
struct LinearMap {
  Eigen::MatrixXd C;  ///< 3N x M
  CMethod method = CMethod::Analytic;
  int m1 = 0, m2 = 0, m3 = 0, m = 0;  ///< column blocks; M = m1+m2+m3+m
  std::vector<int> key_atoms;         ///< per rotatable bond, BFS order
  bool ill_conditioned = false;       ///< least-squares design warning

  int rows() const { return static_cast<int>(C.rows()); }
  int cols() const { return static_cast<int>(C.cols()); }

  /// Atom order with key atoms first (BFS order), then the rest ascending.
  std::vector<int> key_atom_row_order() const;
  /// C with rows permuted to the key-atom-first order.
  Eigen::MatrixXd key_atom_permuted() const;
};

/// Columns are per-atom tangents of the circular motion: for atom a moved
/// by bond j, the 3-block is u_j x (p_a - p_b), whose norm is the radius
/// of a about the axis.
LinearMap analytic_c_rn(const Molecule& molecule, const Conformation& x_eq);

/// Per-block analytic columns: bond columns are the unit axis on moving
/// atoms, angle columns the tangent of rotation about the angle-plane
/// normal, torsion columns as in RN.
LinearMap analytic_c_vrn(const Molecule& molecule, const Conformation& x_eq,
                         const InternalCoords& ic);

/// Least-squares estimate from probe draws: Delta d ~ N(0, probe^2),
/// exact Delta x via the geometry ops, normal equations with Tikhonov
/// damping 1e-10. Throws ConfigError when n_samples < M.
LinearMap lstsq_c(const Molecule& molecule, const Conformation& x_eq,
                  NoiseKind kind, double probe_scale, int n_samples, Rng& rng);

/// E(dpsi) = dpsi^2 - 2 dpsi sin(dpsi) - 2 cos(dpsi) + 2, the exact
/// squared distance between the arc endpoint and its tangent approximation
/// at unit radius; O(dpsi^4).
double rotation_linearization_error(double dpsi);

struct LinearizationReport {
  Eigen::VectorXd d_sq;   ///< per-torsion sums of squared radii D_j
  double residual_sq = 0; ///< || Delta x - C Delta psi ||^2
  double bound = 0;       ///< sum_j D_j E(dpsi_j)
  double c_error = 0;     ///< || residual || / || Delta x ||, 0 for zero dx
};

LinearizationReport linearization_bound_check(const Molecule& molecule,
                                              const Conformation& x_eq,
                                              const Eigen::VectorXd& dpsi);

/// Aggregate ratio ||Dx - C Dd|| / ||Dx|| over a batch stacked column-wise.
/// Throws NumericalError when the batch displacement is all zero.
double c_error(const Eigen::MatrixXd& C, const Eigen::MatrixXd& deltas,
               const Eigen::MatrixXd& dxs);

enum class ScoreKind { Cgn, Can, Hybrid };

struct ScoreTarget {
  Eigen::VectorXd target;
  ScoreKind covariance_used = ScoreKind::Cgn;
  double pinv_tolerance = 0.0;
  bool fell_back_to_can = false;
};

/// Conditional score of the named noise distribution at x_query around
/// x_ref:
///   CGN:    -(x - x_ref) / tau^2
///   CAN:    -Gamma1^+ (x - x_ref),      Gamma1 = C Sigma C^T (pseudo-inverse)
///   Hybrid: -Gamma2^{-1} (x - x_ref),   Gamma2 = tau^2 I + C Sigma C^T (LLT)
/// sigma_sq_diag is the diagonal of Sigma (length M). Hybrid with tau = 0
/// falls back to the CAN pseudo-inverse and sets the flag.
ScoreTarget score_target(ScoreKind kind, const Eigen::VectorXd& x_query,
                         const Eigen::VectorXd& x_ref,
                         const Eigen::MatrixXd& C,
                         const Eigen::VectorXd& sigma_sq_diag, double tau);

/// Diagonal of Sigma for a noise spec over the given coordinate listing.
Eigen::VectorXd noise_sigma_sq_diag(const NoiseSpec& spec,
                                    const InternalCoords& ic);

struct ForceAccuracy {
  double pearson = 0;
  double cosine_mean = 0;
};

/// Pearson correlation over the flattened batch plus mean per-sample cosine
/// similarity. Throws NumericalError on zero-variance input.
ForceAccuracy force_accuracy(const std::vector<Eigen::VectorXd>& estimates,
                             const std::vector<Eigen::VectorXd>& oracle);

}  // namespace frad

#endif
