//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_GEOMETRY_HPP
#define FRAD_GEOMETRY_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "frad/molgraph.hpp"
#include "frad/rng.hpp"

namespace frad {

/// Internal coordinates eligible for noise. Entries lying entirely inside a
/// ring are excluded, and at atoms with more than two neighbours only the
/// angles containing the designated edge are listed, so the coordinates can
/// be perturbed independently.
struct InternalCoords {
  struct BondEntry {
    int i, j;  ///< i is the fixed side, subtree beyond j moves
    double value;
  };
  struct AngleEntry {
    int a, b, c;  ///< hinge at b; (b, a) is the designated edge; c side moves
    double value;
  };
  struct TorsionEntry {
    int a, b, c, d;  ///< measured (a, b, c, d) about axis b->c
    double value;
  };

  std::vector<BondEntry> bond_lengths;      // m1
  std::vector<AngleEntry> angles;           // m2, values in [0, pi]
  std::vector<TorsionEntry> torsions_fixed; // m3, values in [-pi, pi)
  std::vector<TorsionEntry> torsions_rot;   // m, aligned with Molecule::rotatable()
  int skipped_degenerate = 0;  ///< near-linear entries dropped from noise

  int m1() const { return static_cast<int>(bond_lengths.size()); }
  int m2() const { return static_cast<int>(angles.size()); }
  int m3() const { return static_cast<int>(torsions_fixed.size()); }
  int m() const { return static_cast<int>(torsions_rot.size()); }
  int total() const { return m1() + m2() + m3() + m(); }
};

struct InternalCoordsOptions {
  /// Designated edge per multi-neighbour atom: lowest index by default,
  /// drawn from the stream when set (paper-faithful mode).
  bool randomize_designated_edge = false;
  Rng* rng = nullptr;
  /// Throw GeometryError on collinear torsion hinges instead of skipping.
  bool throw_on_degenerate = true;
};

InternalCoords internal_coords(const Molecule& molecule,
                               const Conformation& conf,
                               const InternalCoordsOptions& opts = {});

enum class NoiseKind { RN, VRN, CgnOnly };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::RN;
  double sigma = 2.0;        ///< RN torsion std, radians
  double sigma_r = 0.058;    ///< VRN bond-length std
  double sigma_theta = 0.129;
  double sigma_phi = 0.18;
  double sigma_psi = 1.0;
  double tau = 0.04;         ///< CGN std, length units
};

struct PerturbationRecord {
  Conformation x_eq, x_med, x_fin;
  Eigen::VectorXd delta_internal;  ///< drawn noise; m (RN) or m1+m2+m3+m (VRN)
  Eigen::VectorXd delta_cgn;       ///< 3N; x_fin = x_med + delta_cgn exactly
  std::uint64_t seed = 0;
  int skipped_degenerate = 0;
};

// --- measurements ---

double measure_distance(const Conformation& conf, int i, int j);
double measure_angle(const Conformation& conf, int a, int b, int c);
/// Right-handed (IUPAC) torsion about b->c, in [-pi, pi).
double measure_torsion(const Conformation& conf, int a, int b, int c, int d);

// --- moves ---

/// Rotates every atom of the moving set about the axis through p_b along
/// unit(p_c - p_b) by dpsi (Rodrigues). The measured torsion changes by
/// exactly dpsi (mod 2pi); all bond lengths and angles are unchanged.
Conformation rotate_torsion(const Conformation& conf,
                            const RotatableBond& bond, double dpsi);

/// Applies a given internal-coordinate displacement: blocks in entry order
/// (lengths, angles, fixed torsions, rotatable torsions), subtree moves
/// evaluated on the running geometry. delta must have ic.total() entries.
Conformation apply_internal_delta(const Molecule& molecule,
                                  const Conformation& start,
                                  const InternalCoords& ic,
                                  const Eigen::VectorXd& delta);

/// Applies rotations only, one per rotatable bond in listing order.
Conformation apply_rotations(const Molecule& molecule,
                             const Conformation& start,
                             const Eigen::VectorXd& dpsi);

/// CAN stage of the hybrid noise: draws internal-coordinate noise per the
/// spec kind and applies it block by block (lengths, angles, fixed
/// torsions, rotatable torsions), each block in listing order. Fills x_eq,
/// x_med and delta_internal; x_fin is left empty.
PerturbationRecord apply_can(const Molecule& molecule, const Conformation& x_eq,
                             const NoiseSpec& spec, Rng& rng);

/// CGN stage: x_fin = x_med + tau * z with z iid standard normal.
std::pair<Conformation, Eigen::VectorXd> apply_cgn(const Conformation& x_med,
                                                   double tau, Rng& rng);

/// Full hybrid perturbation (CAN then CGN) with a complete record.
PerturbationRecord perturb(const Molecule& molecule, const Conformation& x_eq,
                           const NoiseSpec& spec, Rng& rng);

/// Mean over atoms of the Euclidean displacement magnitude.
double perturbation_scale(const Conformation& x_eq, const Conformation& x_fin);

}  // namespace frad

#endif
