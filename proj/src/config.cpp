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

#include "qden/config.hpp"

#include <algorithm>

#include <json.hpp>

#include "qden/error.hpp"

namespace qden {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void unknown_key(const std::string& path) {
  throw InvalidArgument("config: unknown key '" + path + "'");
}

template <typename T>
void read(const json& value, const std::string& path, T& out) {
  try {
    out = value.get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config: '" + path + "' has the wrong type");
  }
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw InvalidArgument("config: '" + path + "' must be an object");
}

std::vector<NoiseKind> parse_kinds(const json& value) {
  if (value.is_string()) {
    if (value.get<std::string>() == "all") return {std::begin(kAllNoiseKinds), std::end(kAllNoiseKinds)};
    throw InvalidArgument("config: dataset.kinds must be \"all\" or a list of kind names");
  }
  if (!value.is_array()) throw InvalidArgument("config: dataset.kinds must be \"all\" or a list of kind names");
  std::vector<NoiseKind> kinds;
  for (const auto& item : value) {
    if (!item.is_string()) throw InvalidArgument("config: dataset.kinds entries must be strings");
    auto kind = parse_noise_kind(item.get<std::string>());
    if (!kind) throw InvalidArgument("config: unknown noise kind '" + item.get<std::string>() + "'");
    kinds.push_back(*kind);
  }
  return kinds;
}

void apply_dataset(GenerateConfig& c, const json& j) {
  require_object(j, "dataset");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "dataset." + key;
    if (key == "num_qubits") read(value, path, c.num_qubits);
    else if (key == "num_samples") read(value, path, c.num_samples);
    else if (key == "depth_min") read(value, path, c.depth_min);
    else if (key == "depth_max") read(value, path, c.depth_max);
    else if (key == "kinds") c.kinds = parse_kinds(value);
    else if (key == "levels") read(value, path, c.levels);
    else if (key == "global_seed") read(value, path, c.global_seed);
    else if (key == "threads") read(value, path, c.threads);
    else unknown_key(path);
  }
}

void apply_model(nn::ModelConfig& c, const json& j) {
  require_object(j, "model");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "model." + key;
    if (key == "dim") read(value, path, c.dim);
    else if (key == "filters") read(value, path, c.filters);
    else if (key == "kernel") read(value, path, c.kernel);
    else if (key == "dropout") read(value, path, c.dropout);
    else if (key == "lambda") read(value, path, c.lambda);
    else unknown_key(path);
  }
}

void apply_train(RunConfig& rc, const json& j) {
  require_object(j, "train");
  auto& c = rc.train;
  for (const auto& [key, value] : j.items()) {
    const std::string path = "train." + key;
    if (key == "epochs") read(value, path, c.epochs);
    else if (key == "batch_size") read(value, path, c.batch_size);
    else if (key == "initial_lr") read(value, path, c.initial_lr);
    else if (key == "lr_decay_factor") read(value, path, c.lr_decay_factor);
    else if (key == "plateau_patience_epochs") read(value, path, c.plateau_patience_epochs);
    else if (key == "validation_fraction") read(value, path, c.validation_fraction);
    else if (key == "early_stop_patience") read(value, path, c.early_stop_patience);
    else if (key == "shuffle_seed") read(value, path, c.shuffle_seed);
    else if (key == "improvement_threshold") read(value, path, c.improvement_threshold);
    else if (key == "init_seed") read(value, path, rc.init_seed);
    else unknown_key(path);
  }
}

void apply_split(SplitConfig& c, const json& j) {
  require_object(j, "split");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "split." + key;
    if (key == "test_fraction") read(value, path, c.test_fraction);
    else if (key == "split_seed") read(value, path, c.split_seed);
    else unknown_key(path);
  }
}

void apply_paths(PathConfig& c, const json& j) {
  require_object(j, "paths");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "paths." + key;
    if (key == "data") read(value, path, c.data);
    else if (key == "model") read(value, path, c.model);
    else if (key == "out") read(value, path, c.out);
    else if (key == "log") read(value, path, c.log);
    else unknown_key(path);
  }
}

}  // namespace

void apply_json(RunConfig& config, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: not valid JSON: ") + e.what());
  }
  require_object(j, "<root>");
  for (const auto& [key, value] : j.items()) {
    if (key == "dataset") apply_dataset(config.dataset, value);
    else if (key == "model") apply_model(config.model, value);
    else if (key == "train") apply_train(config, value);
    else if (key == "split") apply_split(config.split, value);
    else if (key == "paths") apply_paths(config.paths, value);
    else unknown_key(key);
  }
}

void validate(const RunConfig& c) {
  const auto& d = c.dataset;
  if (d.num_qubits < 2 || d.num_qubits > 10) throw InvalidArgument("config: dataset.num_qubits must lie in [2, 10]");
  if (d.num_samples == 0) throw InvalidArgument("config: dataset.num_samples must be positive");
  if (d.depth_min > d.depth_max) throw InvalidArgument("config: dataset.depth_min exceeds depth_max");
  if (d.kinds.empty()) throw InvalidArgument("config: dataset.kinds is empty");
  if (d.levels.empty()) throw InvalidArgument("config: dataset.levels is empty");
  for (double level : d.levels)
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("config: dataset.levels entries must lie in (0, 1)");

  // With dim left at 0 it is taken from the data at train time, so only the
  // other model fields are checked here.
  nn::ModelConfig model = c.model;
  if (model.dim == 0) {
    model.dim = 1u << std::min<std::size_t>(model.filters.size(), 16);
  } else if (model.dim != (1u << d.num_qubits)) {
    throw InvalidArgument("config: model.dim " + std::to_string(model.dim) + " does not match 2^" +
                          std::to_string(d.num_qubits));
  }
  nn::validate(model);
  train::validate(c.train);
  if (!(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0)) {
    throw InvalidArgument("config: split.test_fraction must lie in (0, 1)");
  }
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  auto& d = j["dataset"];
  d["num_qubits"] = c.dataset.num_qubits;
  d["num_samples"] = c.dataset.num_samples;
  d["depth_min"] = c.dataset.depth_min;
  d["depth_max"] = c.dataset.depth_max;
  auto kinds = ordered_json::array();
  for (auto k : c.dataset.kinds) kinds.push_back(std::string(noise_kind_name(k)));
  d["kinds"] = kinds;
  d["levels"] = c.dataset.levels;
  d["global_seed"] = c.dataset.global_seed;
  d["threads"] = c.dataset.threads;
  auto& m = j["model"];
  m["dim"] = c.model.dim;
  m["filters"] = c.model.filters;
  m["kernel"] = c.model.kernel;
  m["dropout"] = c.model.dropout;
  m["lambda"] = c.model.lambda;
  auto& t = j["train"];
  t["epochs"] = c.train.epochs;
  t["batch_size"] = c.train.batch_size;
  t["initial_lr"] = c.train.initial_lr;
  t["lr_decay_factor"] = c.train.lr_decay_factor;
  t["plateau_patience_epochs"] = c.train.plateau_patience_epochs;
  t["validation_fraction"] = c.train.validation_fraction;
  t["early_stop_patience"] = c.train.early_stop_patience;
  t["shuffle_seed"] = c.train.shuffle_seed;
  t["improvement_threshold"] = c.train.improvement_threshold;
  t["init_seed"] = c.init_seed;
  auto& s = j["split"];
  s["test_fraction"] = c.split.test_fraction;
  s["split_seed"] = c.split.split_seed;
  auto& p = j["paths"];
  p["data"] = c.paths.data;
  p["model"] = c.paths.model;
  p["out"] = c.paths.out;
  p["log"] = c.paths.log;
  return j.dump(2) + "\n";
}

}  // namespace qden
