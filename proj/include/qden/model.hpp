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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qden/nn.hpp"
#include "qden/tensor.hpp"

namespace qden::nn {

struct ModelConfig {
  std::uint32_t dim = 32;
  /// Encoder widths; the decoder mirrors them in reverse.
  std::vector<std::uint32_t> filters{32, 64, 128};
  std::uint32_t kernel = 3;
  double dropout = 0.1;
  double lambda = 1.0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void validate(const ModelConfig& config);
std::string to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

struct Param {
  std::string name;
  Tensor value;
  Tensor adam_m;
  Tensor adam_v;
};

/// Named parameters in forward order plus Adam state.
struct ModelParams {
  std::vector<Param> params;
  std::uint64_t step = 0;

  void add(std::string name, Tensor value);
  const Param* find(const std::string& name) const;
  Param* find(const std::string& name);
  std::size_t count() const;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Cached activations of one forward pass.
struct ForwardTrace {
  struct Block {
    Tensor input;        // conv input
    Tensor preact;       // conv output, relu input
    std::vector<std::size_t> relu_shape;
    std::vector<std::uint32_t> pool_argmax;  // encoder blocks only
    Tensor dropout_mask;
  };
  std::vector<Block> blocks;
  Tensor head_input;
  Tensor output;
};

/// Encoder: (conv, relu, maxpool2, dropout) per width; decoder: (conv, relu,
/// upsample2, dropout) per mirrored width; then a linear 2-channel conv.
/// Dropout masks come from an Rng seeded with `dropout_seed`.
ForwardTrace model_forward(const ModelParams& params, const ModelConfig& config, const Tensor& x, bool train_mode,
                           std::uint64_t dropout_seed = 0);

/// Gradients aligned with params.params.
std::vector<Tensor> model_backward(const ModelParams& params, const ModelConfig& config, const ForwardTrace& trace,
                                   const Tensor& dout);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam. Throws NumericError naming the tensor if any gradient
/// is non-finite; parameters are left untouched in that case.
void adam_step(ModelParams& params, const std::vector<Tensor>& grads, double lr, const AdamConfig& adam = {});

inline constexpr std::uint32_t kQnnVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  /// Free-form JSON object stored next to the config echo.
  std::string metadata_json = "{}";
};

/// QNN1 (little-endian): "QNN1" | version u32 | header_len u32 | header JSON
/// {"model": config, "metadata": {...}} | tensor_count u32 | per tensor:
/// name_len u32 | name | rank u32 | dims u64 x rank | f64 payload.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

/// Rejects a stored config that differs from `expected` when given.
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<ModelConfig>& expected = {});

}  // namespace qden::nn
