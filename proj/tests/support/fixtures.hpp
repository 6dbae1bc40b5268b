//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_TESTS_FIXTURES_HPP
#define FRAD_TESTS_FIXTURES_HPP

#include <string>

#include "frad/geometry.hpp"
#include "frad/molgraph.hpp"
#include "frad/rng.hpp"

namespace fradtest {

struct Fixture {
  frad::Molecule mol;
  frad::Conformation conf;
};

std::string water_xyz();
std::string ethane_mol();

Fixture methane();           // ideal tetrahedron
Fixture butane();            // trans backbone, full hydrogens
Fixture butene();            // C0-C1=C2-C3 with hydrogens (one fixed torsion)
Fixture propane_heavy();     // 3 carbons, no hydrogens (tree alkane skeleton)
Fixture benzene();           // Kekule ring + hydrogens
Fixture cyclohexane();       // chair ring + hydrogens
Fixture fused_triangles();   // two triangles sharing an edge, 4 atoms
Fixture aspirin_like();      // ring + carboxyl-like arm + methyl arm
Fixture linear_hinge();      // 4-atom chain with a collinear hinge

/// Random tree molecule with C/N/O heavy atoms (valences 4/3/2), hydrogens
/// filling remaining valence, and a clash-free random embedding.
Fixture random_tree_molecule(frad::Rng& rng, int min_heavy, int max_heavy,
                             bool with_hydrogens = true);

/// Random unbranched carbon chain (every internal coordinate independent).
Fixture random_chain_molecule(frad::Rng& rng, int length);

/// Uniform random rotation matrix.
Eigen::Matrix3d random_rotation(frad::Rng& rng);

/// Two-sided Kolmogorov-Smirnov p-value of samples against N(0, sigma^2).
double ks_gaussian_pvalue(std::vector<double> samples, double sigma);

}  // namespace fradtest

#endif
