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

#include <json.hpp>

#include "qden/config.hpp"
#include "qden/error.hpp"

using namespace qden;

TEST_CASE("defaults") {
  RunConfig cfg;
  CHECK(cfg.dataset.num_samples == 10000);
  CHECK(cfg.dataset.num_qubits == 5);
  CHECK(cfg.dataset.kinds.size() == 5);
  CHECK(cfg.dataset.levels == std::vector<double>{0.05, 0.10, 0.15, 0.20});
  CHECK(cfg.model.filters == std::vector<std::uint32_t>{32, 64, 128});
  CHECK(cfg.train.epochs == 100);
  CHECK(cfg.train.batch_size == 16);
  CHECK(cfg.train.initial_lr == 1e-3);
  CHECK(cfg.train.early_stop_patience == 15);
  CHECK(cfg.split.test_fraction == 0.2);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("layered json") {
  RunConfig cfg;
  apply_json(cfg, R"({"dataset":{"num_qubits":3,"kinds":["bitflip","mixed"]},"train":{"epochs":4}})");
  apply_json(cfg, R"({"train":{"batch_size":8},"model":{"lambda":0.5}})");
  CHECK(cfg.dataset.num_qubits == 3);
  CHECK(cfg.dataset.kinds == std::vector<NoiseKind>{NoiseKind::kBitflip, NoiseKind::kMixed});
  CHECK(cfg.train.epochs == 4);
  CHECK(cfg.train.batch_size == 8);
  CHECK(cfg.model.lambda == 0.5);
  apply_json(cfg, R"({"dataset":{"kinds":"all"}})");
  CHECK(cfg.dataset.kinds.size() == 5);

  RunConfig back;
  apply_json(back, to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("bad config input") {
  RunConfig cfg;
  try {
    apply_json(cfg, R"({"train":{"epoch":4}})");
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("train.epoch") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_json(cfg, R"({"bogus":1})"), InvalidArgument);
  CHECK_THROWS_AS(apply_json(cfg, R"({"train":{"epochs":"many"}})"), InvalidArgument);
  CHECK_THROWS_AS(apply_json(cfg, R"({"dataset":{"kinds":["thermal"]}})"), InvalidArgument);
  CHECK_THROWS_AS(apply_json(cfg, "{not json"), InvalidArgument);
  CHECK_THROWS_AS(apply_json(cfg, "[1,2]"), InvalidArgument);

  cfg = RunConfig{};
  cfg.dataset.levels = {0.0};
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = RunConfig{};
  cfg.split.test_fraction = 1.5;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = RunConfig{};
  cfg.model.dim = 16;  // five qubits need 32
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
}
