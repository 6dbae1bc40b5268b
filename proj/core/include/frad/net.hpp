//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_NET_HPP
#define FRAD_NET_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "frad/molgraph.hpp"
#include "frad/rng.hpp"

namespace frad {

struct NetConfig {
  int layers = 3;
  int features = 32;  ///< must be even (heads halve it)
  int rbf = 16;
  double r_cut = 5.0;
  int max_z = 20;  ///< embedding rows indexed by atomic number

  bool operator==(const NetConfig&) const = default;
};

/// All weights as named dense matrices with a flat-vector view. The tensor
/// order is the schema order, fixed for checkpoints and optimizers.
struct ModelParams {
  NetConfig config;
  std::vector<Eigen::MatrixXd> tensors;

  static ModelParams init(const NetConfig& config, Rng& rng);

  int size() const;
  Eigen::VectorXd flat() const;
  void set_flat(const Eigen::VectorXd& theta);

  /// (name, rows, cols) triples in tensor order.
  static std::vector<std::tuple<std::string, int, int>> schema(
      const NetConfig& config);
};

struct ModelOutput {
  Eigen::MatrixXd noise;  ///< N x 3, rotation-equivariant
  double property = 0.0;  ///< invariant scalar
  std::vector<Eigen::MatrixXd> layer_scalars;  ///< u after each update layer
};

/// Full forward pass (no gradients kept).
ModelOutput forward(const ModelParams& params, const Molecule& molecule,
                    const Conformation& conf);

enum class Objective { Frad, Coord, Finetune, NoisyNodes, FradNoisyNodes };

/// One training example. Which fields matter depends on the objective:
///  - Frad/Coord: denoise_input + denoise_target
///  - Finetune: prop_input + label
///  - NoisyNodes: prop_input == denoise_input (single corrupted pass)
///  - FradNoisyNodes: clean prop_input, separately corrupted denoise_input
/// Force-style samples carry force/energy labels instead of a scalar label;
/// predicted forces are -d(PropHead(Encoder(x)))/dx.
struct Sample {
  const Molecule* molecule = nullptr;
  Conformation prop_input;
  Conformation denoise_input;
  Eigen::VectorXd denoise_target;  ///< 3N, the CGN component
  double label = 0.0;
  bool force_style = false;
  double energy_label = 0.0;
  Eigen::VectorXd force_label;  ///< 3N when force_style
};

struct ObjectiveSpec {
  Objective kind = Objective::Frad;
  double lambda_p = 1.0;  ///< property loss weight
  double lambda_n = 0.1;  ///< denoise loss weight
  double w_force = 0.8;
  double w_energy = 0.2;
};

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
  double property_loss = 0.0;
  double denoise_loss = 0.0;
};

/// Loss and flat-parameter gradient over a batch (mean over samples).
/// Reverse-mode through the full graph; for force-style property losses the
/// coordinate gradient is part of the graph, so the parameter gradient is
/// exact. Deterministic for a fixed batch order.
LossGrad loss_and_grad(const ModelParams& params,
                       const std::vector<Sample>& batch,
                       const ObjectiveSpec& objective);

/// Loss only (used by finite-difference checks).
double loss_only(const ModelParams& params, const std::vector<Sample>& batch,
                 const ObjectiveSpec& objective);

// Checkpoints: versioned header, hyperparameters, flat little-endian f64.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace frad

#endif
