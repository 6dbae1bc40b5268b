//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include "frad/molgraph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "frad/errors.hpp"

namespace frad {

namespace {

const std::unordered_map<std::string, int>& element_table() {
  static const std::unordered_map<std::string, int> table = {
      {"H", 1},   {"He", 2},  {"Li", 3},  {"Be", 4},  {"B", 5},   {"C", 6},
      {"N", 7},   {"O", 8},   {"F", 9},   {"Ne", 10}, {"Na", 11}, {"Mg", 12},
      {"Al", 13}, {"Si", 14}, {"P", 15},  {"S", 16},  {"Cl", 17}, {"Ar", 18},
      {"K", 19},  {"Ca", 20}, {"Br", 35}, {"I", 53},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_coord(const std::string& tok, int line_no) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("unparseable coordinate '" + tok + "' on line " +
                     std::to_string(line_no));
  }
  return value;
}

std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

int atomic_number_for(const std::string& symbol) {
  const auto it = element_table().find(symbol);
  if (it == element_table().end()) {
    throw ParseError("unknown element symbol '" + symbol + "'");
  }
  return it->second;
}

bool RotatableBond::moves(int atom) const {
  return std::binary_search(moving_set.begin(), moving_set.end(), atom);
}

Molecule Molecule::from_graph(std::vector<Atom> atoms,
                              std::vector<Bond> bonds) {
  const int n = static_cast<int>(atoms.size());
  if (n == 0) throw TopologyError("molecule has no atoms");

  std::set<std::pair<int, int>> seen;
  for (const Bond& b : bonds) {
    if (b.i < 0 || b.i >= n || b.j < 0 || b.j >= n) {
      throw TopologyError("bond endpoint out of range");
    }
    if (b.i == b.j) throw TopologyError("bond endpoints are not distinct");
    if (b.order < 1 || b.order > 3) {
      throw TopologyError("bond order must be 1-3");
    }
    const auto key = std::minmax(b.i, b.j);
    if (!seen.insert(key).second) {
      throw TopologyError("duplicate bond (" + std::to_string(b.i) + ", " +
                          std::to_string(b.j) + ")");
    }
  }

  Molecule mol;
  mol.atoms_ = std::move(atoms);
  mol.bonds_ = std::move(bonds);
  mol.adjacency_.assign(n, {});
  for (const Bond& b : mol.bonds_) {
    mol.adjacency_[b.i].push_back(b.j);
    mol.adjacency_[b.j].push_back(b.i);
  }
  for (auto& nbrs : mol.adjacency_) std::sort(nbrs.begin(), nbrs.end());

  // connectivity
  std::vector<char> visited(n, 0);
  std::deque<int> queue{0};
  visited[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : mol.adjacency_[u]) {
      if (!visited[v]) {
        visited[v] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  if (reached != n) throw TopologyError("bond graph is not connected");

  mol.ring_bonds_ = detect_rings(mol);
  mol.rotatable_ = find_rotatable_bonds(mol);
  return mol;
}

int Molecule::bond_index(int i, int j) const {
  for (int k = 0; k < bond_count(); ++k) {
    const Bond& b = bonds_[k];
    if ((b.i == i && b.j == j) || (b.i == j && b.j == i)) return k;
  }
  return -1;
}

std::set<int> detect_rings(const Molecule& molecule) {
  // Bridge finding by DFS low-link; an edge of a connected graph lies on a
  // simple cycle iff it is not a bridge.
  const int n = molecule.atom_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::set<int> bridges;
  int timer = 0;

  struct Frame {
    int node;
    int parent_bond;
    size_t next = 0;
  };
  std::vector<Frame> stack;

  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    stack.push_back({root, -1});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& nbrs = molecule.neighbors(f.node);
      if (f.next < nbrs.size()) {
        const int v = nbrs[f.next++];
        const int bond = molecule.bond_index(f.node, v);
        if (bond == f.parent_bond) continue;
        if (disc[v] == -1) {
          disc[v] = low[v] = timer++;
          stack.push_back({v, bond});
        } else {
          low[f.node] = std::min(low[f.node], disc[v]);
        }
      } else {
        const int child = f.node;
        const int bond = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().node;
          low[parent] = std::min(low[parent], low[child]);
          if (low[child] > disc[parent]) bridges.insert(bond);
        }
      }
    }
  }

  std::set<int> rings;
  for (int k = 0; k < molecule.bond_count(); ++k) {
    if (!bridges.count(k)) rings.insert(k);
  }
  return rings;
}

std::vector<int> split_subtree(const Molecule& molecule, int b, int c) {
  const int bond = molecule.bond_index(b, c);
  if (bond < 0) throw TopologyError("no bond between given atoms");
  if (molecule.is_ring_bond(bond)) {
    throw TopologyError("bond (" + std::to_string(b) + ", " +
                        std::to_string(c) +
                        ") is a ring bond; removal does not disconnect");
  }
  std::vector<char> visited(molecule.atom_count(), 0);
  visited[b] = 1;  // block the cut edge
  visited[c] = 1;
  std::deque<int> queue{c};
  std::vector<int> component{c};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : molecule.neighbors(u)) {
      if (!visited[v]) {
        visited[v] = 1;
        component.push_back(v);
        queue.push_back(v);
      }
    }
  }
  std::sort(component.begin(), component.end());
  return component;
}

TreeOrder bfs_tree_order(const Molecule& molecule) {
  const int n = molecule.atom_count();

  // Contract ring systems into single nodes (union-find over ring bonds);
  // the remaining graph is a tree, which fixes the Theorem-style traversal.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int k : molecule.ring_bonds()) {
    const Bond& bond = molecule.bonds()[k];
    const int a = find(bond.i), b = find(bond.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  // Tree edges between contracted nodes, keyed by (inner atom, outer atom)
  // for deterministic traversal order.
  std::vector<std::vector<std::pair<int, int>>> tree(n);  // node -> (atom, nbr)
  for (int k = 0; k < molecule.bond_count(); ++k) {
    if (molecule.is_ring_bond(k)) continue;
    const Bond& bond = molecule.bonds()[k];
    tree[find(bond.i)].push_back({bond.i, bond.j});
    tree[find(bond.j)].push_back({bond.j, bond.i});
  }
  for (auto& edges : tree) std::sort(edges.begin(), edges.end());

  TreeOrder order;
  order.rank.assign(molecule.bond_count(), -1);
  order.parent_child.assign(molecule.bond_count(), {-1, -1});
  int next_rank = 0;

  std::vector<char> node_visited(n, 0);
  std::deque<int> queue{find(0)};
  node_visited[find(0)] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [inner, outer] : tree[u]) {
      const int v = find(outer);
      if (node_visited[v]) continue;
      node_visited[v] = 1;
      queue.push_back(v);
      const int bond_idx = molecule.bond_index(inner, outer);
      order.rank[bond_idx] = next_rank++;
      order.parent_child[bond_idx] = {inner, outer};
    }
  }
  return order;
}

std::vector<RotatableBond> find_rotatable_bonds(const Molecule& molecule) {
  const TreeOrder order = bfs_tree_order(molecule);

  std::vector<std::pair<int, int>> ranked;  // (rank, bond index)
  for (int k = 0; k < molecule.bond_count(); ++k) {
    if (order.rank[k] >= 0) ranked.push_back({order.rank[k], k});
  }
  std::sort(ranked.begin(), ranked.end());

  std::vector<RotatableBond> result;
  for (const auto& [rank, bond_idx] : ranked) {
    const Bond& bond = molecule.bonds()[bond_idx];
    const auto [inner, outer] = order.parent_child[bond_idx];
    const bool terminal = molecule.neighbors(inner).size() < 2 ||
                          molecule.neighbors(outer).size() < 2;
    if (bond.order != 1 || terminal) continue;

    RotatableBond rb;
    rb.b = inner;
    rb.c = outer;
    rb.moving_set = split_subtree(molecule, rb.b, rb.c);
    for (int nbr : molecule.neighbors(rb.c)) {
      if (nbr != rb.b && rb.moves(nbr)) {
        rb.key_atom = nbr;
        break;
      }
    }
    rb.ref_d = rb.key_atom;
    for (int nbr : molecule.neighbors(rb.b)) {
      if (nbr != rb.c && !rb.moves(nbr)) {
        rb.ref_a = nbr;
        break;
      }
    }
    result.push_back(std::move(rb));
  }
  return result;
}

std::pair<std::vector<Atom>, Conformation> parse_xyz(const std::string& text) {
  const auto lines = read_lines(text);
  if (lines.empty()) throw ParseError("empty XYZ input");

  int declared = 0;
  try {
    declared = std::stoi(trim(lines[0]));
  } catch (const std::exception&) {
    throw ParseError("first XYZ line must be the atom count");
  }
  if (declared <= 0) throw ParseError("XYZ atom count must be positive");

  std::vector<Atom> atoms;
  Eigen::VectorXd coords(3 * declared);
  int found = 0;
  for (size_t ln = 2; ln < lines.size(); ++ln) {
    const std::string line = trim(lines[ln]);
    if (line.empty()) continue;
    if (found == declared) {
      throw ParseError("more atom lines than the declared count " +
                       std::to_string(declared));
    }
    const auto tok = split_ws(line);
    if (tok.size() < 4) {
      throw ParseError("malformed XYZ atom line " + std::to_string(ln + 1));
    }
    Atom atom;
    atom.symbol = tok[0];
    atom.atomic_number = atomic_number_for(atom.symbol);
    for (int d = 0; d < 3; ++d) {
      coords[3 * found + d] =
          parse_coord(tok[1 + d], static_cast<int>(ln + 1));
    }
    atoms.push_back(std::move(atom));
    ++found;
  }
  if (found != declared) {
    throw ParseError("XYZ declares " + std::to_string(declared) +
                     " atoms but has " + std::to_string(found));
  }
  return {std::move(atoms), Conformation(std::move(coords))};
}

std::string emit_xyz(const std::vector<Atom>& atoms, const Conformation& conf,
                     const std::string& comment) {
  if (static_cast<int>(atoms.size()) != conf.atom_count()) {
    throw DataError("atom list and conformation size mismatch");
  }
  std::ostringstream out;
  out << atoms.size() << "\n" << comment << "\n";
  out.setf(std::ios::fixed);
  out.precision(9);
  for (size_t a = 0; a < atoms.size(); ++a) {
    out << atoms[a].symbol;
    for (int d = 0; d < 3; ++d) out << " " << conf.coords[3 * a + d];
    out << "\n";
  }
  return out.str();
}

MolData parse_mol(const std::string& text) {
  const auto lines = read_lines(text);
  if (lines.size() < 4) throw ParseError("MOL input too short");

  const std::string& counts = lines[3];
  const auto counts_tok = split_ws(counts);
  if (counts_tok.size() < 2) throw ParseError("malformed V2000 counts line");
  int n_atoms = 0, n_bonds = 0;
  try {
    if (counts.size() >= 6) {
      n_atoms = std::stoi(counts.substr(0, 3));
      n_bonds = std::stoi(counts.substr(3, 3));
    } else {
      n_atoms = std::stoi(counts_tok[0]);
      n_bonds = std::stoi(counts_tok[1]);
    }
  } catch (const std::exception&) {
    throw ParseError("malformed V2000 counts line");
  }
  for (const auto& tok : counts_tok) {
    if (tok.size() == 5 && tok[0] == 'V' && tok != "V2000") {
      throw ParseError("unsupported MOL version '" + tok + "'");
    }
  }
  if (n_atoms <= 0) throw ParseError("MOL atom count must be positive");
  if (lines.size() < static_cast<size_t>(4 + n_atoms + n_bonds)) {
    throw ParseError("MOL input truncated");
  }

  MolData data;
  std::vector<Atom> atoms;
  Eigen::VectorXd coords(3 * n_atoms);
  for (int a = 0; a < n_atoms; ++a) {
    const auto tok = split_ws(lines[4 + a]);
    if (tok.size() < 4) {
      throw ParseError("malformed MOL atom line " + std::to_string(5 + a));
    }
    Atom atom;
    atom.symbol = tok[3];
    atom.atomic_number = atomic_number_for(atom.symbol);
    for (int d = 0; d < 3; ++d) coords[3 * a + d] = parse_coord(tok[d], 5 + a);
    if (tok.size() > 5 && tok[5] != "0") {
      data.warnings.push_back("atom " + std::to_string(a) +
                              ": charge field ignored");
    }
    atoms.push_back(std::move(atom));
  }

  std::vector<Bond> bonds;
  for (int k = 0; k < n_bonds; ++k) {
    const std::string& line = lines[4 + n_atoms + k];
    int i = 0, j = 0, order = 0;
    try {
      if (line.size() >= 9) {
        i = std::stoi(line.substr(0, 3));
        j = std::stoi(line.substr(3, 3));
        order = std::stoi(line.substr(6, 3));
      } else {
        const auto tok = split_ws(line);
        if (tok.size() < 3) throw ParseError("short bond line");
        i = std::stoi(tok[0]);
        j = std::stoi(tok[1]);
        order = std::stoi(tok[2]);
      }
    } catch (const std::exception&) {
      throw ParseError("malformed MOL bond line " +
                       std::to_string(5 + n_atoms + k));
    }
    if (i < 1 || i > n_atoms || j < 1 || j > n_atoms) {
      throw ParseError("MOL bond index out of range on line " +
                       std::to_string(5 + n_atoms + k));
    }
    if (order == 4) order = 1;  // aromatic flag: treated as single, no
                                // aromaticity perception at desk scale
    bonds.push_back({i - 1, j - 1, order});
  }

  for (size_t ln = 4 + n_atoms + n_bonds; ln < lines.size(); ++ln) {
    const std::string line = trim(lines[ln]);
    if (line.rfind("M  CHG", 0) == 0 || line.rfind("M  ISO", 0) == 0 ||
        line.rfind("M  RAD", 0) == 0) {
      data.warnings.push_back("property line ignored: " + line.substr(0, 6));
    }
  }

  data.molecule = Molecule::from_graph(std::move(atoms), std::move(bonds));
  data.conformation = Conformation(std::move(coords));
  return data;
}

}  // namespace frad
