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
#include <string>

#include "qden/dataset.hpp"
#include "qden/model.hpp"
#include "qden/train.hpp"

namespace qden {

struct SplitConfig {
  double test_fraction = 0.2;
  std::uint64_t split_seed = 1234;
};

struct PathConfig {
  std::string data;
  std::string model;
  std::string out;
  std::string log;
};

/// Everything a run needs. Serialized as
///   {"dataset": {...}, "model": {...}, "train": {...}, "split": {...},
///    "paths": {...}}
/// `model.dim` of 0 means "take it from the dataset".
struct RunConfig {
  GenerateConfig dataset;
  nn::ModelConfig model{0};
  train::TrainConfig train;
  std::uint64_t init_seed = 7;
  SplitConfig split;
  PathConfig paths;
};

/// Overlays the keys present in `json_text` onto `config`. Unknown keys and
/// wrongly typed values throw InvalidArgument naming the key path.
void apply_json(RunConfig& config, const std::string& json_text);

/// Checks every field; throws InvalidArgument on the first bad one.
void validate(const RunConfig& config);

std::string to_json(const RunConfig& config);

}  // namespace qden
