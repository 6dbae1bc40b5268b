//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_MOLGRAPH_HPP
#define FRAD_MOLGRAPH_HPP

#include <Eigen/Core>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace frad {

struct Atom {
  std::string symbol;
  int atomic_number = 0;
};

/// Undirected bond; endpoints are stored as given, identity is the
/// unordered pair.
struct Bond {
  int i = -1;
  int j = -1;
  int order = 1;
};

/// Cartesian coordinates of one conformation, length 3N, atom-major
/// (x0, y0, z0, x1, ...). Desk units: 1 unit is roughly 1 Angstrom.
struct Conformation {
  Eigen::VectorXd coords;

  Conformation() = default;
  explicit Conformation(Eigen::VectorXd c) : coords(std::move(c)) {}

  int atom_count() const { return static_cast<int>(coords.size()) / 3; }

  Eigen::Vector3d position(int atom) const {
    return coords.segment<3>(3 * atom);
  }
  void set_position(int atom, const Eigen::Vector3d& p) {
    coords.segment<3>(3 * atom) = p;
  }
};

/// A rotatable single bond b-c. Rotating it moves the c-side subtree
/// (the child side in the breadth-first tree rooted at atom 0) while the
/// b side stays fixed.
struct RotatableBond {
  int b = -1;  ///< fixed-side axis atom
  int c = -1;  ///< moving-side axis atom
  std::vector<int> moving_set;  ///< sorted; contains c, not b
  int ref_a = -1;  ///< reference neighbour of b (fixed side)
  int ref_d = -1;  ///< reference neighbour of c (moving side)
  int key_atom = -1;  ///< lowest-index moving neighbour of c

  /// Measured torsion is (ref_a, b, c, ref_d), right-handed about b->c.
  bool moves(int atom) const;
};

/// Static molecular topology. Immutable after construction; ring bonds and
/// rotatable bonds are derived once in from_graph.
class Molecule {
 public:
  Molecule() = default;

  /// Validates the graph (distinct in-range endpoints, no duplicate pairs,
  /// connected), then derives ring bonds and rotatable bonds.
  static Molecule from_graph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::set<int>& ring_bonds() const { return ring_bonds_; }
  const std::vector<RotatableBond>& rotatable() const { return rotatable_; }

  /// Neighbour atom indices, ascending.
  const std::vector<int>& neighbors(int atom) const { return adjacency_[atom]; }

  /// Index into bonds() for the unordered pair (i, j), or -1.
  int bond_index(int i, int j) const;

  bool is_ring_bond(int bond_idx) const {
    return ring_bonds_.count(bond_idx) > 0;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
  std::set<int> ring_bonds_;
  std::vector<RotatableBond> rotatable_;
};

/// Bond indices lying on at least one simple cycle, computed as the
/// complement of bridge edges (DFS low-link).
std::set<int> detect_rings(const Molecule& molecule);

/// Atoms of the connected component containing c after deleting bond (b, c).
/// Throws TopologyError when the bond is a ring bond (no disconnection).
std::vector<int> split_subtree(const Molecule& molecule, int b, int c);

/// Every order-1 non-ring bond whose endpoints both have at least one other
/// neighbour (hydrogens count), ordered breadth-first from atom 0 over the
/// ring-contracted tree. Ties break on smaller atom index.
std::vector<RotatableBond> find_rotatable_bonds(const Molecule& molecule);

/// Breadth-first traversal of the ring-contracted tree from the node
/// containing atom 0. Non-ring bonds get a discovery rank and a
/// (parent side, child side) orientation; ring bonds keep rank -1.
struct TreeOrder {
  std::vector<int> rank;                           ///< per bond, -1 for ring
  std::vector<std::pair<int, int>> parent_child;   ///< per bond
};
TreeOrder bfs_tree_order(const Molecule& molecule);

int atomic_number_for(const std::string& symbol);  // throws ParseError

// --- file formats ---

std::pair<std::vector<Atom>, Conformation> parse_xyz(const std::string& text);

/// Coordinates printed with 9 decimal places; round-trips to 1e-9.
std::string emit_xyz(const std::vector<Atom>& atoms, const Conformation& conf,
                     const std::string& comment = "");

struct MolData {
  Molecule molecule;
  Conformation conformation;
  std::vector<std::string> warnings;
};

/// MOL V2000 subset: counts line, atom block, bond block. Charges, isotopes
/// and stereo flags are ignored with a warning.
MolData parse_mol(const std::string& text);

}  // namespace frad

#endif
