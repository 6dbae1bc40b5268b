//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_PES_HPP
#define FRAD_PES_HPP

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "frad/molgraph.hpp"
#include "frad/rng.hpp"

namespace frad {

struct BondTerm {
  int i, j;
  double k, r0;
};
struct AngleTerm {
  int a, b, c;
  double k, theta0;
};
/// v * (1 + cos(n * psi - gamma)) on the measured tuple (a, b, c, d).
struct TorsionTerm {
  int a, b, c, d;
  double v, gamma;
  int n;
};

/// Analytic desk-scale potential: harmonic bonds and angles plus cosine
/// torsions. Built from internal coordinates only, so it is invariant under
/// rigid motions by construction. kT = 1 in desk units.
struct ForceField {
  std::vector<BondTerm> bonds;
  std::vector<AngleTerm> angles;
  std::vector<TorsionTerm> torsions;
  double kT = 1.0;
};

struct EnergyBreakdown {
  double value = 0.0;
  int skipped_terms = 0;  ///< degenerate angle/torsion contributions dropped
};

EnergyBreakdown energy_detail(const ForceField& field, const Conformation& x);
double energy(const ForceField& field, const Conformation& x);

/// -dE/dx, assembled from analytic internal-coordinate gradients.
Eigen::VectorXd forces(const ForceField& field, const Conformation& x);

/// forces / kT, the Boltzmann score of p(x) ~ exp(-E/kT).
Eigen::VectorXd boltzmann_score(const ForceField& field, const Conformation& x);

struct MinimizeOptions {
  double grad_tol = 1e-8;  ///< infinity norm of the gradient
  int max_iterations = 100000;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  /// Armijo reference window: 1 gives the classic monotone line search;
  /// larger windows accept any step below the window maximum, which lets
  /// the Barzilai-Borwein lengths sweep stiff and soft modes alike.
  int nonmonotone_window = 1;
};

struct MinimizeResult {
  Conformation x;
  bool converged = false;
  int iterations = 0;
  double grad_inf_norm = 0.0;
  double energy = 0.0;
};

/// Gradient descent with Armijo backtracking line search. Non-convergence
/// is reported through the flag, not an exception.
MinimizeResult minimize(const ForceField& field, const Conformation& start,
                        const MinimizeOptions& opts = {});

struct DatasetEntry {
  Molecule molecule;
  Conformation x_eq;
  ForceField field;
  double label_energy = 0.0;  ///< E(x_eq)
  double label_gap = 0.0;     ///< torsion-profile softmin gap surrogate
  Eigen::VectorXd label_forces;  ///< set only by force-task builders
  std::string tag;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  std::vector<std::string> skipped;  ///< tags of failed minimizations

  int size() const { return static_cast<int>(entries.size()); }
};

struct GeneratorConfig {
  int count = 200;
  int min_heavy = 3;
  int max_heavy = 8;
  double branch_prob = 0.35;  ///< attach to a random earlier atom vs chain end
  double ring_prob = 0.25;    ///< one 4-6 ring seeded before the tree part
  bool hydrogens = true;
  // Documented parameter ranges; torsion barriers are far below bond
  // stiffness so bond rotations stay the soft modes.
  double k_bond_min = 100.0, k_bond_max = 400.0;
  double r0_min = 1.0, r0_max = 1.6;
  double k_angle_min = 40.0, k_angle_max = 120.0;
  double v_min = 0.5, v_max = 2.0;
  int threads = 1;
};

/// Random molecules with random force fields, minimized to equilibrium.
/// Entries that fail the gradient audit are skipped and listed in
/// Dataset::skipped. Deterministic for a fixed seed stream: entry k uses
/// rng.split(k), so thread count does not change the output.
Dataset generate_dataset(const GeneratorConfig& config, const Rng& rng);

/// Builds a random force field for a molecule (all bonds, all neighbour-pair
/// angles, one cosine torsion per rotatable reference tuple).
ForceField random_field(const Molecule& molecule, const GeneratorConfig& config,
                        Rng& rng);

/// Torsion-profile label: mean over rotatable bonds of the gap between the
/// average and the softmin of a 24-point scan energy profile; 0 when m = 0.
double softmin_gap_label(const DatasetEntry& entry);

// JSON-lines manifest (one object per line: elements, bonds, coords, field,
// labels, tag).
void write_manifest(const Dataset& dataset, std::ostream& out);
std::string manifest_to_string(const Dataset& dataset);
Dataset read_manifest(std::istream& in);
Dataset read_manifest_file(const std::string& path);
void write_manifest_file(const Dataset& dataset, const std::string& path);

}  // namespace frad

#endif
