//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "frad/errors.hpp"
#include "frad/geometry.hpp"
#include "frad/pes.hpp"

namespace frad {

namespace {

using nlohmann::json;

struct Topology {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  int ring_size = 0;
};

Topology random_topology(const GeneratorConfig& config, Rng& rng) {
  Topology top;
  const int n_heavy = rng.uniform_int(config.min_heavy, config.max_heavy);
  std::vector<int> free_valence;

  const bool with_ring =
      n_heavy >= 4 && rng.uniform() < config.ring_prob;
  if (with_ring) {
    top.ring_size = rng.uniform_int(4, std::min(6, n_heavy));
    for (int k = 0; k < top.ring_size; ++k) {
      top.atoms.push_back({"C", 6});
      free_valence.push_back(2);  // two valences consumed by the ring
      top.bonds.push_back({k, (k + 1) % top.ring_size, 1});
    }
  }

  while (static_cast<int>(top.atoms.size()) < n_heavy) {
    const int idx = static_cast<int>(top.atoms.size());
    const double pick = rng.uniform();
    if (pick < 0.7) {
      top.atoms.push_back({"C", 6});
      free_valence.push_back(4);
    } else if (pick < 0.85) {
      top.atoms.push_back({"N", 7});
      free_valence.push_back(3);
    } else {
      top.atoms.push_back({"O", 8});
      free_valence.push_back(2);
    }
    if (idx == 0) continue;
    std::vector<int> candidates;
    for (int j = 0; j < idx; ++j) {
      if (free_valence[j] > 0) candidates.push_back(j);
    }
    int parent;
    if (candidates.empty()) {
      parent = idx - 1;  // degenerate fallback, valence be damned
    } else if (rng.uniform() < config.branch_prob) {
      parent = candidates[rng.uniform_int(
          0, static_cast<int>(candidates.size()) - 1)];
    } else {
      parent = candidates.back();
    }
    top.bonds.push_back({parent, idx, 1});
    --free_valence[parent];
    --free_valence[idx];
  }

  if (config.hydrogens) {
    const int heavy = static_cast<int>(top.atoms.size());
    for (int i = 0; i < heavy; ++i) {
      for (int v = 0; v < free_valence[i]; ++v) {
        const int h = static_cast<int>(top.atoms.size());
        top.atoms.push_back({"H", 1});
        top.bonds.push_back({i, h, 1});
      }
    }
  }
  return top;
}

Conformation random_embedding(const Topology& top, Rng& rng) {
  const int n = static_cast<int>(top.atoms.size());
  std::vector<Eigen::Vector3d> pos(n);
  std::vector<char> placed(n, 0);

  int first_free = 0;
  if (top.ring_size > 0) {
    const double radius = 1.5 / (2.0 * std::sin(M_PI / top.ring_size));
    for (int k = 0; k < top.ring_size; ++k) {
      const double a = 2.0 * M_PI * k / top.ring_size;
      pos[k] = {radius * std::cos(a), radius * std::sin(a), 0.0};
      placed[k] = 1;
    }
    first_free = top.ring_size;
  } else {
    pos[0] = {0, 0, 0};
    placed[0] = 1;
    first_free = 1;
  }

  for (const Bond& b : top.bonds) {
    if (placed[b.i] && placed[b.j]) continue;
    const int parent = placed[b.i] ? b.i : b.j;
    const int child = placed[b.i] ? b.j : b.i;
    const double len = top.atoms[child].symbol == "H" ? 1.1 : 1.5;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Eigen::Vector3d dir(s * std::cos(phi), s * std::sin(phi), z);
      const Eigen::Vector3d candidate = pos[parent] + len * dir;
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) {
        if (placed[j] && j != parent && (candidate - pos[j]).norm() < 0.95) {
          ok = false;
        }
      }
      if (ok) {
        for (const Bond& other : top.bonds) {
          int third = -1;
          if (other.i == parent && placed[other.j] && other.j != child) {
            third = other.j;
          }
          if (other.j == parent && placed[other.i] && other.i != child) {
            third = other.i;
          }
          if (third >= 0 &&
              std::abs((pos[third] - pos[parent]).normalized().dot(dir)) >
                  0.93) {
            ok = false;
            break;
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
  (void)first_free;
  Eigen::VectorXd coords(3 * n);
  for (int i = 0; i < n; ++i) coords.segment<3>(3 * i) = pos[i];
  return Conformation(std::move(coords));
}

json field_to_json(const ForceField& field) {
  json j;
  j["kT"] = field.kT;
  j["bonds"] = json::array();
  for (const BondTerm& t : field.bonds) {
    j["bonds"].push_back({t.i, t.j, t.k, t.r0});
  }
  j["angles"] = json::array();
  for (const AngleTerm& t : field.angles) {
    j["angles"].push_back({t.a, t.b, t.c, t.k, t.theta0});
  }
  j["torsions"] = json::array();
  for (const TorsionTerm& t : field.torsions) {
    j["torsions"].push_back({t.a, t.b, t.c, t.d, t.v, t.n, t.gamma});
  }
  return j;
}

ForceField field_from_json(const json& j) {
  ForceField field;
  field.kT = j.at("kT").get<double>();
  for (const auto& t : j.at("bonds")) {
    field.bonds.push_back({t.at(0).get<int>(), t.at(1).get<int>(),
                           t.at(2).get<double>(), t.at(3).get<double>()});
  }
  for (const auto& t : j.at("angles")) {
    field.angles.push_back({t.at(0).get<int>(), t.at(1).get<int>(),
                            t.at(2).get<int>(), t.at(3).get<double>(),
                            t.at(4).get<double>()});
  }
  for (const auto& t : j.at("torsions")) {
    field.torsions.push_back({t.at(0).get<int>(), t.at(1).get<int>(),
                              t.at(2).get<int>(), t.at(3).get<int>(),
                              t.at(4).get<double>(), t.at(6).get<double>(),
                              t.at(5).get<int>()});
  }
  return field;
}

}  // namespace

ForceField random_field(const Molecule& molecule, const GeneratorConfig& config,
                        Rng& rng) {
  ForceField field;
  for (const Bond& b : molecule.bonds()) {
    const bool to_h = molecule.atoms()[b.i].symbol == "H" ||
                      molecule.atoms()[b.j].symbol == "H";
    field.bonds.push_back({b.i, b.j,
                           rng.uniform(config.k_bond_min, config.k_bond_max),
                           to_h ? rng.uniform(0.95, 1.15)
                                : rng.uniform(config.r0_min, config.r0_max)});
  }
  for (int b = 0; b < molecule.atom_count(); ++b) {
    const auto& nbrs = molecule.neighbors(b);
    for (size_t x = 0; x < nbrs.size(); ++x) {
      for (size_t y = x + 1; y < nbrs.size(); ++y) {
        field.angles.push_back(
            {nbrs[x], b, nbrs[y],
             rng.uniform(config.k_angle_min, config.k_angle_max),
             rng.uniform(1.7, 2.1)});
      }
    }
  }
  for (const RotatableBond& rb : molecule.rotatable()) {
    TorsionTerm t;
    t.a = rb.ref_a;
    t.b = rb.b;
    t.c = rb.c;
    t.d = rb.ref_d;
    t.v = rng.uniform(config.v_min, config.v_max);
    t.n = rng.uniform_int(1, 3);
    t.gamma = rng.uniform(0.0, 2.0 * M_PI);
    field.torsions.push_back(t);
  }
  return field;
}

double softmin_gap_label(const DatasetEntry& entry) {
  const auto& rotatable = entry.molecule.rotatable();
  if (rotatable.empty()) return 0.0;
  constexpr int kGrid = 24;
  double label = 0.0;
  int counted = 0;
  for (const RotatableBond& rb : rotatable) {
    double mean = 0.0;
    double softmin_acc = 0.0;
    std::vector<double> energies(kGrid);
    double e_min = 0.0;
    for (int g = 0; g < kGrid; ++g) {
      const double dpsi = 2.0 * M_PI * g / kGrid;
      const Conformation turned = rotate_torsion(entry.x_eq, rb, dpsi);
      energies[g] = energy(entry.field, turned);
      mean += energies[g] / kGrid;
      e_min = g == 0 ? energies[g] : std::min(e_min, energies[g]);
    }
    for (int g = 0; g < kGrid; ++g) {
      softmin_acc += std::exp(-(energies[g] - e_min)) / kGrid;
    }
    const double softmin = e_min - std::log(softmin_acc);
    label += mean - softmin;
    ++counted;
  }
  return counted == 0 ? 0.0 : label / counted;
}

Dataset generate_dataset(const GeneratorConfig& config, const Rng& rng) {
  if (config.count < 0) throw ConfigError("dataset count must be >= 0");
  Dataset dataset;
  if (config.count == 0) return dataset;

  std::vector<DatasetEntry> slots(config.count);
  std::vector<char> ok(config.count, 0);

  const auto build_entry = [&](int k) {
    Rng stream = rng.split(static_cast<std::uint64_t>(k));
    const Topology top = random_topology(config, stream);
    DatasetEntry entry;
    entry.molecule = Molecule::from_graph(top.atoms, top.bonds);
    const Conformation start = random_embedding(top, stream);
    entry.field = random_field(entry.molecule, config, stream);

    MinimizeOptions mopts;
    mopts.nonmonotone_window = 10;
    mopts.max_iterations = 40000;
    const MinimizeResult min = minimize(entry.field, start, mopts);
#ifdef FRAD_DATASET_DEBUG
    fprintf(stderr, "entry %d: conv=%d iters=%d ginf=%.3e E=%.4f atoms=%d\n", k,
            (int)min.converged, min.iterations, min.grad_inf_norm, min.energy,
            entry.molecule.atom_count());
#endif
    if (min.grad_inf_norm >= 1e-6) return;  // the stored-equilibrium audit
    entry.x_eq = min.x;
    entry.label_energy = min.energy;
    entry.label_gap = softmin_gap_label(entry);
    char tag[32];
    std::snprintf(tag, sizeof(tag), "mol-%06d", k);
    entry.tag = tag;
    slots[k] = std::move(entry);
    ok[k] = 1;
  };

  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (int k = 0; k < config.count; ++k) build_entry(k);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (int k = t; k < config.count; k += threads) build_entry(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (int k = 0; k < config.count; ++k) {
    if (ok[k]) {
      dataset.entries.push_back(std::move(slots[k]));
    } else {
      char tag[32];
      std::snprintf(tag, sizeof(tag), "mol-%06d", k);
      dataset.skipped.push_back(tag);
    }
  }
  return dataset;
}

void write_manifest(const Dataset& dataset, std::ostream& out) {
  for (const DatasetEntry& entry : dataset.entries) {
    json j;
    j["tag"] = entry.tag;
    j["elements"] = json::array();
    for (const Atom& a : entry.molecule.atoms()) j["elements"].push_back(a.symbol);
    j["bonds"] = json::array();
    for (const Bond& b : entry.molecule.bonds()) {
      j["bonds"].push_back({b.i, b.j, b.order});
    }
    j["coords"] = json::array();
    for (Eigen::Index i = 0; i < entry.x_eq.coords.size(); ++i) {
      j["coords"].push_back(entry.x_eq.coords[i]);
    }
    j["field"] = field_to_json(entry.field);
    j["labels"] = {{"energy", entry.label_energy}, {"gap", entry.label_gap}};
    if (entry.label_forces.size() > 0) {
      j["labels"]["forces"] = json::array();
      for (Eigen::Index i = 0; i < entry.label_forces.size(); ++i) {
        j["labels"]["forces"].push_back(entry.label_forces[i]);
      }
    }
    out << j.dump() << "\n";
  }
}

std::string manifest_to_string(const Dataset& dataset) {
  std::ostringstream out;
  write_manifest(dataset, out);
  return out.str();
}

Dataset read_manifest(std::istream& in) {
  Dataset dataset;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    DatasetEntry entry;
    std::vector<Atom> atoms;
    for (const auto& s : j.at("elements")) {
      const std::string symbol = s.get<std::string>();
      atoms.push_back({symbol, atomic_number_for(symbol)});
    }
    std::vector<Bond> bonds;
    for (const auto& b : j.at("bonds")) {
      bonds.push_back(
          {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>()});
    }
    entry.molecule = Molecule::from_graph(std::move(atoms), std::move(bonds));
    const auto& coords = j.at("coords");
    Eigen::VectorXd c(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) c[i] = coords[i].get<double>();
    if (c.size() != 3 * entry.molecule.atom_count()) {
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": coordinate count mismatch");
    }
    entry.x_eq = Conformation(std::move(c));
    entry.field = field_from_json(j.at("field"));
    entry.label_energy = j.at("labels").at("energy").get<double>();
    entry.label_gap = j.at("labels").at("gap").get<double>();
    if (j.at("labels").contains("forces")) {
      const auto& fs = j.at("labels").at("forces");
      entry.label_forces.resize(fs.size());
      for (size_t i = 0; i < fs.size(); ++i) {
        entry.label_forces[i] = fs[i].get<double>();
      }
    }
    entry.tag = j.value("tag", "");
    dataset.entries.push_back(std::move(entry));
  }
  return dataset;
}

Dataset read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset manifest: " + path);
  return read_manifest(in);
}

void write_manifest_file(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset manifest: " + path);
  write_manifest(dataset, out);
}

}  // namespace frad
