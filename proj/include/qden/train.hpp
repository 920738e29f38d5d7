// Copyright 2026 The qden Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qden/dataset.hpp"
#include "qden/model.hpp"

namespace qden::train {

struct TrainConfig {
  std::uint32_t epochs = 100;
  std::uint32_t batch_size = 16;
  double initial_lr = 1e-3;
  double lr_decay_factor = 0.5;
  std::uint32_t plateau_patience_epochs = 5;
  double validation_fraction = 0.2;
  std::uint32_t early_stop_patience = 15;
  std::uint64_t shuffle_seed = 7;
  /// Minimum absolute drop in validation loss that counts as improvement.
  double improvement_threshold = 1e-6;
};

void validate(const TrainConfig& config);

struct EpochLog {
  std::uint32_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_mae = 0.0;
  double val_loss = 0.0;
  double val_mae = 0.0;
  double lr = 0.0;  // rate used during this epoch
  double seconds = 0.0;
};

/// One JSON object, no trailing newline.
std::string to_json_line(const EpochLog& log);

/// Reduce-on-plateau: after `patience` consecutive epochs without an
/// improvement larger than `threshold`, multiply the rate by `factor` and
/// restart the count.
class PlateauScheduler {
 public:
  PlateauScheduler(double initial_lr, double factor, std::uint32_t patience, double threshold);

  /// Feeds one validation loss; returns true when this call decayed the rate.
  bool observe(double val_loss);
  double lr() const { return lr_; }
  double best() const { return best_; }
  std::uint32_t stagnant_epochs() const { return stagnant_; }

 private:
  double lr_;
  double factor_;
  std::uint32_t patience_;
  double threshold_;
  double best_ = std::numeric_limits<double>::infinity();
  std::uint32_t stagnant_ = 0;
};

/// (N, dim, dim, 2) batch of the noisy (inputs) or clean (targets) states.
Tensor make_batch(const Dataset& dataset, std::span<const std::size_t> indices, bool clean);

using BatchPredictor = std::function<Tensor(const Tensor& inputs)>;

/// Eval-mode forward pass of the autoencoder.
BatchPredictor model_predictor(const nn::ModelParams& params, const nn::ModelConfig& config);

struct LossSummary {
  double loss = 0.0;
  double mae = 0.0;
};

/// Composite loss and MAE of predictor(noisy) against clean over `indices`.
LossSummary evaluate_loss(const BatchPredictor& predictor, const Dataset& dataset,
                          std::span<const std::size_t> indices, double lambda, std::size_t batch_size = 64);
LossSummary evaluate_loss(const nn::ModelParams& params, const nn::ModelConfig& config, const Dataset& dataset,
                          std::span<const std::size_t> indices, std::size_t batch_size = 64);

struct TrainResult {
  nn::ModelParams final_params;
  nn::ModelParams best_params;
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::uint32_t best_epoch = 0;
  std::vector<EpochLog> logs;
  std::vector<std::size_t> fit_indices;
  std::vector<std::size_t> val_indices;
  /// Every sample index that entered a gradient batch, in order.
  std::vector<std::size_t> gradient_indices;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Carves a stratified validation split out of `train_indices`, then runs
/// seeded shuffled mini-batch Adam with plateau decay and early stopping.
/// Throws NumericError naming the epoch and batch on a non-finite loss.
TrainResult train(nn::ModelParams params, const nn::ModelConfig& model_config, const Dataset& dataset,
                  std::span<const std::size_t> train_indices, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace qden::train
