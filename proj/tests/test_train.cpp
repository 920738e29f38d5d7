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

#include <doctest.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "qden/error.hpp"
#include "qden/train.hpp"

using namespace qden;
using namespace qden::train;

namespace {

const Dataset& toy_dataset() {
  static const Dataset ds = [] {
    GenerateConfig cfg;
    cfg.num_samples = 120;
    cfg.num_qubits = 2;
    cfg.threads = 1;
    return generate_dataset(cfg);
  }();
  return ds;
}

nn::ModelConfig toy_model() {
  nn::ModelConfig cfg;
  cfg.dim = 4;
  cfg.filters = {4, 8};
  cfg.dropout = 0.1;
  return cfg;
}

TrainConfig quick_config(std::uint32_t epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.initial_lr = 3e-3;
  return cfg;
}

}  // namespace

TEST_CASE("plateau scheduler") {
  PlateauScheduler s(1.0, 0.5, 3, 1e-6);
  CHECK_FALSE(s.observe(1.0));
  CHECK_FALSE(s.observe(1.0));
  CHECK_FALSE(s.observe(0.9999995));  // below the threshold
  CHECK(s.stagnant_epochs() == 2);
  CHECK(s.observe(2.0));
  CHECK(s.lr() == 0.5);
  CHECK(s.stagnant_epochs() == 0);
  CHECK_FALSE(s.observe(0.5));
  CHECK(s.best() == 0.5);
  CHECK_FALSE(s.observe(0.6));
  CHECK_FALSE(s.observe(0.6));
  CHECK(s.observe(0.6));
  CHECK(s.lr() == 0.25);
}

TEST_CASE("train config validation") {
  auto cfg = quick_config(1);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = quick_config(1);
  cfg.lr_decay_factor = 1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = quick_config(1);
  cfg.validation_fraction = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = quick_config(1);
  cfg.initial_lr = -1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
}

TEST_CASE("make_batch and evaluate_loss") {
  const auto& ds = toy_dataset();
  const std::vector<std::size_t> idx{3, 0, 7};
  const auto noisy = make_batch(ds, idx, false);
  CHECK(noisy.shape() == std::vector<std::size_t>{3, 4, 4, 2});
  CHECK(batch_item_to_matrix(noisy, 0) == ds.samples[3].noisy.mat);
  CHECK(batch_item_to_matrix(make_batch(ds, idx, true), 2) == ds.samples[7].clean.mat);
  const std::vector<std::size_t> bad{500};
  CHECK_THROWS_AS(make_batch(ds, bad, false), InvalidArgument);

  std::vector<std::size_t> all(ds.samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const BatchPredictor identity = [](const Tensor& x) { return x; };
  const auto whole = nn::composite_loss(make_batch(ds, all, false), make_batch(ds, all, true), 1.0);
  for (std::size_t bs : {1, 7, 64, 500}) {
    const auto s = evaluate_loss(identity, ds, all, 1.0, bs);
    CHECK(std::abs(s.loss - whole.loss) <= 1e-12);
    CHECK(std::abs(s.mae - whole.mae) <= 1e-12);
  }
}

TEST_CASE("zero epochs returns the initial weights") {
  const auto& ds = toy_dataset();
  const auto split = split_train_test(ds, 0.2, 1);
  const auto init = nn::init_params(toy_model(), 3);
  const auto r = train::train(init, toy_model(), ds, split.train, quick_config(0));
  CHECK(r.logs.empty());
  CHECK(r.gradient_indices.empty());
  for (std::size_t i = 0; i < init.params.size(); ++i) {
    CHECK(r.final_params.params[i].value == init.params[i].value);
    CHECK(r.best_params.params[i].value == init.params[i].value);
  }
}

TEST_CASE("training reduces validation loss") {
  const auto& ds = toy_dataset();
  const auto split = split_train_test(ds, 0.2, 1);
  std::vector<EpochLog> seen;
  const auto r = train::train(nn::init_params(toy_model(), 3), toy_model(), ds, split.train, quick_config(12),
                       [&](const EpochLog& log) { seen.push_back(log); });
  REQUIRE(r.logs.size() == 12);
  CHECK(seen.size() == 12);
  CHECK(r.best_val_loss < r.logs.front().val_loss);
  CHECK(r.logs.back().train_loss < r.logs.front().train_loss);
  CHECK(r.best_epoch >= 1);
  CHECK(r.best_val_loss == r.logs[r.best_epoch - 1].val_loss);
  for (std::size_t e = 0; e < r.logs.size(); ++e) CHECK(r.logs[e].epoch == e + 1);

  // The retained weights reproduce the best validation loss.
  const auto again = evaluate_loss(r.best_params, toy_model(), ds, r.val_indices);
  CHECK(again.loss == r.best_val_loss);
}

TEST_CASE("validation loss falls steadily on a linearly denoisable set") {
  // Global depolarizing at one fixed level is an affine map of the clean state.
  GenerateConfig gen;
  gen.num_samples = 200;
  gen.num_qubits = 2;
  gen.kinds = {NoiseKind::kDepolarizing};
  gen.levels = {0.1};
  gen.threads = 1;
  const auto ds = generate_dataset(gen);
  auto model = toy_model();
  model.dropout = 0.0;
  std::vector<std::size_t> all(ds.samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto r = train::train(nn::init_params(model, 4), model, ds, all, quick_config(3));
  REQUIRE(r.logs.size() == 3);
  CHECK(r.logs[1].val_loss < r.logs[0].val_loss);
  CHECK(r.logs[2].val_loss < r.logs[1].val_loss);
}

TEST_CASE("no leakage into validation or test") {
  const auto& ds = toy_dataset();
  const auto split = split_train_test(ds, 0.2, 1);
  const auto r = train::train(nn::init_params(toy_model(), 3), toy_model(), ds, split.train, quick_config(2));
  const std::set<std::size_t> fit(r.fit_indices.begin(), r.fit_indices.end());
  const std::set<std::size_t> val(r.val_indices.begin(), r.val_indices.end());
  const std::set<std::size_t> test(split.test.begin(), split.test.end());
  CHECK(fit.size() + val.size() == split.train.size());
  CHECK(r.gradient_indices.size() == 2 * fit.size());
  for (auto i : r.gradient_indices) {
    CHECK(fit.count(i) == 1);
    CHECK(val.count(i) == 0);
    CHECK(test.count(i) == 0);
  }
  for (auto i : val) CHECK(test.count(i) == 0);
}

TEST_CASE("training is reproducible") {
  const auto& ds = toy_dataset();
  const auto split = split_train_test(ds, 0.2, 1);
  auto run = [&] {
    std::vector<std::string> lines;
    const auto r = train::train(nn::init_params(toy_model(), 3), toy_model(), ds, split.train, quick_config(3));
    for (auto log : r.logs) {
      log.seconds = 0.0;
      lines.push_back(to_json_line(log));
    }
    return std::make_pair(lines, r.final_params.params[0].value);
  };
  const auto a = run(), b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);

  const auto line = nlohmann::json::parse(a.first[0]);
  for (const char* key : {"epoch", "train_loss", "train_mae", "val_loss", "val_mae", "lr", "seconds"})
    CHECK(line.contains(key));
}

TEST_CASE("plateau decay and early stopping") {
  const auto& ds = toy_dataset();
  const auto split = split_train_test(ds, 0.2, 1);
  auto cfg = quick_config(40);
  cfg.initial_lr = 1e-14;  // weights barely move, so validation loss stalls
  const auto r = train::train(nn::init_params(toy_model(), 3), toy_model(), ds, split.train, cfg);
  CHECK(r.early_stopped);
  CHECK(r.best_epoch == 1);
  REQUIRE(r.logs.size() == 16);
  CHECK(r.logs[5].lr == 1e-14);
  CHECK(r.logs[6].lr == 0.5e-14);
  CHECK(r.logs[11].lr == 0.25e-14);

  cfg.epochs = 15;  // patience not exceeded: early stopping is off
  const auto full = train::train(nn::init_params(toy_model(), 3), toy_model(), ds, split.train, cfg);
  CHECK_FALSE(full.early_stopped);
  CHECK(full.logs.size() == 15);
}

TEST_CASE("train input errors") {
  const auto& ds = toy_dataset();
  const std::vector<std::size_t> none;
  CHECK_THROWS_AS(train::train(nn::init_params(toy_model(), 3), toy_model(), ds, none, quick_config(1)), InvalidArgument);
  auto wide = toy_model();
  wide.dim = 8;
  const auto split = split_train_test(ds, 0.2, 1);
  CHECK_THROWS_AS(train::train(nn::init_params(wide, 3), wide, ds, split.train, quick_config(1)), ConfigMismatch);
}
