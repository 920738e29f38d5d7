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

#include "qden/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "qden/error.hpp"
#include "qden/rng.hpp"

namespace qden::train {
namespace {

constexpr std::uint64_t kValidationStream = 0x76616c69ULL;  // "vali"

}  // namespace

void validate(const TrainConfig& c) {
  if (c.batch_size == 0) throw InvalidArgument("train config: batch_size must be positive");
  if (!(c.initial_lr > 0.0) || !std::isfinite(c.initial_lr)) throw InvalidArgument("train config: lr must be > 0");
  if (!(c.lr_decay_factor > 0.0 && c.lr_decay_factor < 1.0)) {
    throw InvalidArgument("train config: lr_decay_factor must lie in (0, 1)");
  }
  if (c.plateau_patience_epochs == 0) throw InvalidArgument("train config: plateau patience must be positive");
  if (c.early_stop_patience == 0) throw InvalidArgument("train config: early-stop patience must be positive");
  if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0)) {
    throw InvalidArgument("train config: validation_fraction must lie in (0, 1)");
  }
  if (!(c.improvement_threshold >= 0.0)) throw InvalidArgument("train config: improvement threshold must be >= 0");
}

std::string to_json_line(const EpochLog& log) {
  nlohmann::ordered_json j;
  j["epoch"] = log.epoch;
  j["train_loss"] = log.train_loss;
  j["train_mae"] = log.train_mae;
  j["val_loss"] = log.val_loss;
  j["val_mae"] = log.val_mae;
  j["lr"] = log.lr;
  j["seconds"] = log.seconds;
  return j.dump();
}

PlateauScheduler::PlateauScheduler(double initial_lr, double factor, std::uint32_t patience, double threshold)
    : lr_(initial_lr), factor_(factor), patience_(patience), threshold_(threshold) {}

bool PlateauScheduler::observe(double val_loss) {
  if (val_loss < best_ - threshold_) {
    best_ = val_loss;
    stagnant_ = 0;
    return false;
  }
  if (++stagnant_ >= patience_) {
    lr_ *= factor_;
    stagnant_ = 0;
    return true;
  }
  return false;
}

Tensor make_batch(const Dataset& dataset, std::span<const std::size_t> indices, bool clean) {
  const std::size_t dim = dataset.manifest.dim;
  Tensor batch({indices.size(), dim, dim, 2});
  double* out = batch.data().data();
  for (std::size_t idx : indices) {
    if (idx >= dataset.samples.size()) throw InvalidArgument("make_batch: sample index out of range");
    const auto& rec = dataset.samples[idx];
    const CMat& m = clean ? rec.clean.mat : rec.noisy.mat;
    if (m.rows() != dim) throw InvalidArgument("make_batch: sample dimension mismatch");
    for (const auto& v : m.data()) {
      *out++ = v.real();
      *out++ = v.imag();
    }
  }
  return batch;
}

BatchPredictor model_predictor(const nn::ModelParams& params, const nn::ModelConfig& config) {
  return [&params, &config](const Tensor& inputs) {
    return nn::model_forward(params, config, inputs, /*train_mode=*/false).output;
  };
}

LossSummary evaluate_loss(const BatchPredictor& predictor, const Dataset& dataset,
                          std::span<const std::size_t> indices, double lambda, std::size_t batch_size) {
  LossSummary s;
  if (indices.empty()) return s;
  batch_size = std::max<std::size_t>(batch_size, 1);
  double loss_sum = 0.0, mae_sum = 0.0;
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const auto chunk = indices.subspan(start, std::min(batch_size, indices.size() - start));
    const Tensor pred = predictor(make_batch(dataset, chunk, false));
    const auto r = nn::composite_loss(pred, make_batch(dataset, chunk, true), lambda);
    loss_sum += r.loss * static_cast<double>(chunk.size());
    mae_sum += r.mae * static_cast<double>(chunk.size());
  }
  s.loss = loss_sum / static_cast<double>(indices.size());
  s.mae = mae_sum / static_cast<double>(indices.size());
  return s;
}

LossSummary evaluate_loss(const nn::ModelParams& params, const nn::ModelConfig& config, const Dataset& dataset,
                          std::span<const std::size_t> indices, std::size_t batch_size) {
  return evaluate_loss(model_predictor(params, config), dataset, indices, config.lambda, batch_size);
}

TrainResult train(nn::ModelParams params, const nn::ModelConfig& model_config, const Dataset& dataset,
                  std::span<const std::size_t> train_indices, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  validate(config);
  nn::validate(model_config);
  if (train_indices.empty()) throw InvalidArgument("train: training set is empty");
  if (dataset.manifest.dim != model_config.dim) {
    throw ConfigMismatch("train: dataset dim " + std::to_string(dataset.manifest.dim) + " != model dim " +
                         std::to_string(model_config.dim));
  }

  TrainResult result;
  auto split = split_indices(dataset, train_indices, config.validation_fraction,
                             derive_seed(config.shuffle_seed, kValidationStream));
  result.fit_indices = std::move(split.train);
  result.val_indices = std::move(split.test);
  result.best_params = params;
  if (config.epochs == 0) {
    result.final_params = std::move(params);
    return result;
  }

  PlateauScheduler scheduler(config.initial_lr, config.lr_decay_factor, config.plateau_patience_epochs,
                             config.improvement_threshold);
  const bool early_stop_enabled = config.epochs > config.early_stop_patience;
  std::uint32_t since_best = 0;
  std::vector<std::size_t> order = result.fit_indices;

  for (std::uint32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t epoch_seed = derive_seed(config.shuffle_seed, epoch);
    Rng rng(epoch_seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    EpochLog log;
    log.epoch = epoch;
    log.lr = scheduler.lr();
    double loss_sum = 0.0, mae_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::span<const std::size_t> chunk(order.data() + start,
                                               std::min<std::size_t>(config.batch_size, order.size() - start));
      result.gradient_indices.insert(result.gradient_indices.end(), chunk.begin(), chunk.end());
      const Tensor x = make_batch(dataset, chunk, false);
      const Tensor y = make_batch(dataset, chunk, true);
      const auto trace = nn::model_forward(params, model_config, x, /*train_mode=*/true,
                                           derive_seed(epoch_seed, batch_index + 1));
      const auto loss = nn::composite_loss(trace.output, y, model_config.lambda);
      if (!std::isfinite(loss.loss)) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      const auto grads = nn::model_backward(params, model_config, trace, loss.grad);
      nn::adam_step(params, grads, scheduler.lr());
      loss_sum += loss.loss * static_cast<double>(chunk.size());
      mae_sum += loss.mae * static_cast<double>(chunk.size());
    }
    log.train_loss = loss_sum / static_cast<double>(order.size());
    log.train_mae = mae_sum / static_cast<double>(order.size());

    const auto val = evaluate_loss(params, model_config, dataset, result.val_indices);
    log.val_loss = val.loss;
    log.val_mae = val.mae;
    if (!std::isfinite(val.loss)) throw NumericError("train: non-finite validation loss at epoch " + std::to_string(epoch));

    if (val.loss < result.best_val_loss - config.improvement_threshold) {
      result.best_val_loss = val.loss;
      result.best_epoch = epoch;
      result.best_params = params;
      since_best = 0;
    } else {
      ++since_best;
    }
    scheduler.observe(val.loss);
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.logs.push_back(log);
    if (on_epoch) on_epoch(log);

    if (early_stop_enabled && since_best >= config.early_stop_patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.final_params = std::move(params);
  return result;
}

}  // namespace qden::train
