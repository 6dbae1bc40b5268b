//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include "support/fixtures.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

namespace fradtest {

using frad::Atom;
using frad::Bond;
using frad::Conformation;
using frad::Molecule;

namespace {

constexpr double kCC = 1.53;
constexpr double kCH = 1.10;
constexpr double kTet = 1.9106332362490186;  // arccos(-1/3)

Atom atom(const std::string& symbol) {
  return {symbol, frad::atomic_number_for(symbol)};
}

/// Unit vectors orthogonal to a.
std::pair<Eigen::Vector3d, Eigen::Vector3d> orthobasis(
    const Eigen::Vector3d& a) {
  Eigen::Vector3d ref = std::abs(a.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                              : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = a.cross(ref).normalized();
  const Eigen::Vector3d e2 = a.cross(e1).normalized();
  return {e1, e2};
}

/// Three hydrogen positions completing a tetrahedral site at p whose
/// existing substituent lies along `toward`.
std::vector<Eigen::Vector3d> methyl_hydrogens(const Eigen::Vector3d& p,
                                              const Eigen::Vector3d& toward,
                                              double phase = 0.0) {
  const Eigen::Vector3d a = toward.normalized();
  const auto [e1, e2] = orthobasis(a);
  std::vector<Eigen::Vector3d> out;
  for (int k = 0; k < 3; ++k) {
    const double phi = phase + 2.0 * M_PI * k / 3.0;
    const Eigen::Vector3d dir = std::cos(kTet) * a +
                                std::sin(kTet) * (std::cos(phi) * e1 +
                                                  std::sin(phi) * e2);
    out.push_back(p + kCH * dir);
  }
  return out;
}

Fixture make(std::vector<Atom> atoms, std::vector<Bond> bonds,
             const std::vector<Eigen::Vector3d>& pos) {
  Fixture f;
  f.mol = Molecule::from_graph(std::move(atoms), std::move(bonds));
  Eigen::VectorXd coords(3 * pos.size());
  for (size_t i = 0; i < pos.size(); ++i) coords.segment<3>(3 * i) = pos[i];
  f.conf = Conformation(std::move(coords));
  return f;
}

}  // namespace

std::string water_xyz() {
  return "3\nwater\n"
         "O 0.000000000 0.000000000 0.117300000\n"
         "H 0.000000000 0.757200000 -0.469200000\n"
         "H 0.000000000 -0.757200000 -0.469200000\n";
}

std::string ethane_mol() {
  return "ethane\n  frad\n\n"
         "  8  7  0  0  0  0  0  0  0  0999 V2000\n"
         "    0.0000    0.0000    0.0000 C   0  0\n"
         "    1.5300    0.0000    0.0000 C   0  0\n"
         "   -0.3969    1.0368    0.0000 H   0  0\n"
         "   -0.3969   -0.5184    0.8979 H   0  0\n"
         "   -0.3969   -0.5184   -0.8979 H   0  0\n"
         "    1.9269   -1.0368    0.0000 H   0  0\n"
         "    1.9269    0.5184    0.8979 H   0  0\n"
         "    1.9269    0.5184   -0.8979 H   0  0\n"
         "  1  2  1  0\n"
         "  1  3  1  0\n"
         "  1  4  1  0\n"
         "  1  5  1  0\n"
         "  2  6  1  0\n"
         "  2  7  1  0\n"
         "  2  8  1  0\n"
         "M  END\n";
}

Fixture methane() {
  const double r = kCH / std::sqrt(3.0);
  std::vector<Eigen::Vector3d> pos = {
      {0, 0, 0}, {r, r, r}, {r, -r, -r}, {-r, r, -r}, {-r, -r, r}};
  std::vector<Atom> atoms = {atom("C"), atom("H"), atom("H"), atom("H"),
                             atom("H")};
  std::vector<Bond> bonds = {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}};
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture butane() {
  // Planar zigzag backbone: every backbone torsion is exactly 180 degrees.
  const double half = M_PI - kTet;  // deviation of each segment from x
  std::vector<Eigen::Vector3d> pos(14);
  pos[0] = {0, 0, 0};
  pos[1] = pos[0] + kCC * Eigen::Vector3d(1, 0, 0);
  pos[2] = pos[1] + kCC * Eigen::Vector3d(std::cos(half), std::sin(half), 0);
  pos[3] = pos[2] + kCC * Eigen::Vector3d(1, 0, 0);

  const auto h0 = methyl_hydrogens(pos[0], pos[1] - pos[0]);
  pos[4] = h0[0];
  pos[5] = h0[1];
  pos[6] = h0[2];
  {
    const Eigen::Vector3d u = (pos[0] - pos[1]).normalized();
    const Eigen::Vector3d v = (pos[2] - pos[1]).normalized();
    const Eigen::Vector3d bisect = -(u + v).normalized();
    const Eigen::Vector3d out = u.cross(v).normalized();
    pos[7] = pos[1] + kCH * (bisect * std::sin(kTet / 2) + out * std::cos(kTet / 2)).normalized();
    pos[8] = pos[1] + kCH * (bisect * std::sin(kTet / 2) - out * std::cos(kTet / 2)).normalized();
  }
  {
    const Eigen::Vector3d u = (pos[1] - pos[2]).normalized();
    const Eigen::Vector3d v = (pos[3] - pos[2]).normalized();
    const Eigen::Vector3d bisect = -(u + v).normalized();
    const Eigen::Vector3d out = u.cross(v).normalized();
    pos[9] = pos[2] + kCH * (bisect * std::sin(kTet / 2) + out * std::cos(kTet / 2)).normalized();
    pos[10] = pos[2] + kCH * (bisect * std::sin(kTet / 2) - out * std::cos(kTet / 2)).normalized();
  }
  const auto h3 = methyl_hydrogens(pos[3], pos[2] - pos[3], 0.3);
  pos[11] = h3[0];
  pos[12] = h3[1];
  pos[13] = h3[2];

  std::vector<Atom> atoms;
  for (int i = 0; i < 4; ++i) atoms.push_back(atom("C"));
  for (int i = 0; i < 10; ++i) atoms.push_back(atom("H"));
  std::vector<Bond> bonds = {{0, 1, 1}, {1, 2, 1},  {2, 3, 1},
                             {0, 4, 1}, {0, 5, 1},  {0, 6, 1},
                             {1, 7, 1}, {1, 8, 1},  {2, 9, 1},
                             {2, 10, 1}, {3, 11, 1}, {3, 12, 1}, {3, 13, 1}};
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture butene() {
  // C0-C1=C2-C3; the double bond contributes a fixed torsion.
  const double half = M_PI - kTet;
  std::vector<Eigen::Vector3d> pos(10);
  pos[0] = {0, 0, 0};
  pos[1] = pos[0] + kCC * Eigen::Vector3d(1, 0, 0);
  pos[2] = pos[1] + 1.34 * Eigen::Vector3d(std::cos(half), std::sin(half), 0);
  pos[3] = pos[2] + kCC * Eigen::Vector3d(1, 0, 0);
  const auto h0 = methyl_hydrogens(pos[0], pos[1] - pos[0]);
  pos[4] = h0[0];
  pos[5] = h0[1];
  pos[6] = h0[2];
  pos[7] = pos[1] + kCH * Eigen::Vector3d(0.2, -0.9, 0.3).normalized();
  pos[8] = pos[2] + kCH * Eigen::Vector3d(-0.2, 0.9, 0.3).normalized();
  const auto h3 = methyl_hydrogens(pos[3], pos[2] - pos[3], 0.4);
  pos[9] = h3[0];

  std::vector<Atom> atoms;
  for (int i = 0; i < 4; ++i) atoms.push_back(atom("C"));
  for (int i = 0; i < 6; ++i) atoms.push_back(atom("H"));
  std::vector<Bond> bonds = {{0, 1, 1}, {1, 2, 2}, {2, 3, 1}, {0, 4, 1},
                             {0, 5, 1}, {0, 6, 1}, {1, 7, 1}, {2, 8, 1},
                             {3, 9, 1}};
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture propane_heavy() {
  const double half = M_PI - kTet;
  std::vector<Eigen::Vector3d> pos = {
      {0, 0, 0},
      {kCC, 0, 0},
      {kCC + kCC * std::cos(half), kCC * std::sin(half), 0}};
  std::vector<Atom> atoms = {atom("C"), atom("C"), atom("C")};
  std::vector<Bond> bonds = {{0, 1, 1}, {1, 2, 1}};
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture benzene() {
  std::vector<Eigen::Vector3d> pos(12);
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI * k / 3.0;
    pos[k] = {1.39 * std::cos(a), 1.39 * std::sin(a), 0};
    pos[6 + k] = {2.49 * std::cos(a), 2.49 * std::sin(a), 0};
    atoms.push_back(atom("C"));
    bonds.push_back({k, (k + 1) % 6, k % 2 == 0 ? 2 : 1});
    bonds.push_back({k, 6 + k, 1});
  }
  for (int k = 0; k < 6; ++k) atoms.push_back(atom("H"));
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture cyclohexane() {
  std::vector<Eigen::Vector3d> pos(18);
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  const double r = 1.46, h = 0.245;
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI * k / 3.0;
    const double z = (k % 2 == 0) ? h : -h;
    pos[k] = {r * std::cos(a), r * std::sin(a), z};
    atoms.push_back(atom("C"));
    bonds.push_back({k, (k + 1) % 6, 1});
  }
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI * k / 3.0;
    const double z = (k % 2 == 0) ? h : -h;
    pos[6 + 2 * k] = {(r + 0.9) * std::cos(a), (r + 0.9) * std::sin(a),
                      z + 0.7};
    pos[7 + 2 * k] = {(r + 0.9) * std::cos(a), (r + 0.9) * std::sin(a),
                      z - 0.7};
    atoms.push_back(atom("H"));
    atoms.push_back(atom("H"));
    bonds.push_back({k, 6 + 2 * k, 1});
    bonds.push_back({k, 7 + 2 * k, 1});
  }
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture fused_triangles() {
  std::vector<Eigen::Vector3d> pos = {
      {0, 0, 0}, {1.5, 0, 0}, {0.75, 1.3, 0}, {2.25, 1.3, 0}};
  std::vector<Atom> atoms = {atom("C"), atom("C"), atom("C"), atom("C")};
  std::vector<Bond> bonds = {
      {0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}};
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture aspirin_like() {
  // Ring atoms 0-5; carboxyl-like arm on atom 0 (C6, =O7, -O8-H9); methyl
  // arm on atom 1 (C10 with H11-13); ring hydrogens on atoms 2-5.
  std::vector<Eigen::Vector3d> pos(18);
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI * k / 3.0;
    pos[k] = {1.39 * std::cos(a), 1.39 * std::sin(a), 0};
    atoms.push_back(atom("C"));
    bonds.push_back({k, (k + 1) % 6, k % 2 == 0 ? 2 : 1});
  }
  const Eigen::Vector3d out0 = pos[0].normalized();
  pos[6] = pos[0] + 1.50 * out0;                               // C6
  pos[7] = pos[6] + 1.23 * (out0 + Eigen::Vector3d(0, 0.9, 0.25)).normalized();
  pos[8] = pos[6] + 1.36 * (out0 + Eigen::Vector3d(0, -0.9, -0.2)).normalized();
  pos[9] = pos[8] + 0.97 * Eigen::Vector3d(0.4, -0.8, 0.45).normalized();
  atoms.push_back(atom("C"));
  atoms.push_back(atom("O"));
  atoms.push_back(atom("O"));
  atoms.push_back(atom("H"));
  bonds.push_back({0, 6, 1});
  bonds.push_back({6, 7, 2});
  bonds.push_back({6, 8, 1});
  bonds.push_back({8, 9, 1});

  const Eigen::Vector3d out1 = pos[1].normalized();
  pos[10] = pos[1] + 1.50 * out1;  // C10 methyl carbon
  atoms.push_back(atom("C"));
  bonds.push_back({1, 10, 1});
  const auto hs = methyl_hydrogens(pos[10], pos[1] - pos[10], 0.2);
  for (int k = 0; k < 3; ++k) {
    pos[11 + k] = hs[k];
    atoms.push_back(atom("H"));
    bonds.push_back({10, 11 + k, 1});
  }
  for (int k = 2; k < 6; ++k) {
    pos[12 + k] = pos[k] + 1.1 * pos[k].normalized();
    atoms.push_back(atom("H"));
    bonds.push_back({k, 12 + k, 1});
  }
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture linear_hinge() {
  std::vector<Eigen::Vector3d> pos = {
      {0, 0, 0}, {1.5, 0, 0}, {3.0, 0, 0}, {4.0, 1.2, 0}};
  std::vector<Atom> atoms = {atom("C"), atom("C"), atom("C"), atom("C")};
  std::vector<Bond> bonds = {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}};
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture random_tree_molecule(frad::Rng& rng, int min_heavy, int max_heavy,
                             bool with_hydrogens) {
  const int n_heavy = rng.uniform_int(min_heavy, max_heavy);
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<int> free_valence;

  for (int i = 0; i < n_heavy; ++i) {
    const double pick = rng.uniform();
    if (pick < 0.7) {
      atoms.push_back(atom("C"));
      free_valence.push_back(4);
    } else if (pick < 0.85) {
      atoms.push_back(atom("N"));
      free_valence.push_back(3);
    } else {
      atoms.push_back(atom("O"));
      free_valence.push_back(2);
    }
    if (i > 0) {
      std::vector<int> candidates;
      for (int j = 0; j < i; ++j) {
        if (free_valence[j] > 0) candidates.push_back(j);
      }
      const int parent = candidates.empty()
                             ? i - 1
                             : candidates[rng.uniform_int(
                                   0, static_cast<int>(candidates.size()) - 1)];
      bonds.push_back({parent, i, 1});
      --free_valence[parent];
      --free_valence[i];
    }
  }
  if (with_hydrogens) {
    const int heavy = static_cast<int>(atoms.size());
    for (int i = 0; i < heavy; ++i) {
      for (int v = 0; v < free_valence[i]; ++v) {
        const int h = static_cast<int>(atoms.size());
        atoms.push_back(atom("H"));
        bonds.push_back({i, h, 1});
      }
    }
  }

  // Clash-free greedy embedding along the bond tree.
  const int n = static_cast<int>(atoms.size());
  std::vector<Eigen::Vector3d> pos(n);
  pos[0] = {0, 0, 0};
  std::vector<char> placed(n, 0);
  placed[0] = 1;
  // Children adjacency from the bond list (parents precede children).
  for (const Bond& b : bonds) {
    const int parent = placed[b.i] ? b.i : b.j;
    const int child = placed[b.i] ? b.j : b.i;
    const double len = atoms[child].symbol == "H" ? kCH : kCC;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Eigen::Vector3d dir(s * std::cos(phi), s * std::sin(phi), z);
      const Eigen::Vector3d candidate = pos[parent] + len * dir;
      bool ok = true;
      for (int j = 0; j < n; ++j) {
        if (!placed[j] || j == parent) continue;
        if ((candidate - pos[j]).norm() < 0.95) {
          ok = false;
          break;
        }
      }
      // Reject near-collinear placement at the parent.
      if (ok) {
        for (const Bond& other : bonds) {
          if (&other == &b) continue;
          int third = -1;
          if (other.i == parent && placed[other.j]) third = other.j;
          if (other.j == parent && placed[other.i]) third = other.i;
          if (third >= 0) {
            const Eigen::Vector3d u = (pos[third] - pos[parent]).normalized();
            if (std::abs(u.dot(dir)) > 0.93) {
              ok = false;
              break;
            }
          }
        }
      }
      if (ok || attempt == 199) {
        pos[child] = candidate;
        placed[child] = 1;
        break;
      }
    }
  }
  return make(std::move(atoms), std::move(bonds), pos);
}

Fixture random_chain_molecule(frad::Rng& rng, int length) {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<Eigen::Vector3d> pos(length);
  pos[0] = {0, 0, 0};
  pos[1] = {kCC, 0, 0};
  atoms.push_back(atom("C"));
  atoms.push_back(atom("C"));
  bonds.push_back({0, 1, 1});
  for (int i = 2; i < length; ++i) {
    atoms.push_back(atom("C"));
    bonds.push_back({i - 1, i, 1});
    const Eigen::Vector3d axis = (pos[i - 1] - pos[i - 2]).normalized();
    const auto [e1, e2] = orthobasis(axis);
    const double theta = kTet + rng.uniform(-0.15, 0.15);
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const Eigen::Vector3d dir =
        std::cos(M_PI - theta) * axis +
        std::sin(M_PI - theta) * (std::cos(phi) * e1 + std::sin(phi) * e2);
    pos[i] = pos[i - 1] + kCC * dir;
  }
  return make(std::move(atoms), std::move(bonds), pos);
}

Eigen::Matrix3d random_rotation(frad::Rng& rng) {
  const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  const Eigen::Quaterniond q(
      std::sqrt(1 - u1) * std::sin(2 * M_PI * u2),
      std::sqrt(1 - u1) * std::cos(2 * M_PI * u2),
      std::sqrt(u1) * std::sin(2 * M_PI * u3),
      std::sqrt(u1) * std::cos(2 * M_PI * u3));
  return q.normalized().toRotationMatrix();
}

double ks_gaussian_pvalue(std::vector<double> samples, double sigma) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-samples[i] / (sigma * std::sqrt(2.0)));
    d = std::max(d, std::abs(cdf - (i + 1) / n));
    d = std::max(d, std::abs(cdf - i / n));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace fradtest
