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

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qden/qden.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("qden_capi_" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  qden_string_free(s);
  return out;
}

const char* kSmallData = R"({"dataset":{"num_qubits":2,"num_samples":120,"threads":2}})";
const char* kSmallTrain =
    R"({"model":{"filters":[4,8],"dropout":0.0},"train":{"epochs":3,"batch_size":8,"initial_lr":0.003}})";

qden_dataset* small_dataset() {
  qden_dataset* ds = nullptr;
  REQUIRE(qden_dataset_generate(kSmallData, &ds) == QDEN_OK);
  return ds;
}

}  // namespace

TEST_CASE("version and config resolution") {
  CHECK(std::string(qden_version()) == "0.1.0");
  const char* layers[] = {R"({"train":{"epochs":5}})", R"({"train":{"batch_size":4}})"};
  char* out = nullptr;
  REQUIRE(qden_config_resolve(layers, 2, &out) == QDEN_OK);
  const auto j = nlohmann::json::parse(take(out));
  CHECK(j["train"]["epochs"] == 5);
  CHECK(j["train"]["batch_size"] == 4);
  CHECK(j["train"]["initial_lr"] == 1e-3);

  const char* bad[] = {R"({"train":{"epochz":5}})"};
  CHECK(qden_config_resolve(bad, 1, &out) == QDEN_INVALID_ARGUMENT);
  CHECK(std::string(qden_last_error()).find("train.epochz") != std::string::npos);
  CHECK(qden_config_resolve(layers, 2, nullptr) == QDEN_INVALID_ARGUMENT);
}

TEST_CASE("dataset handles") {
  Scratch tmp;
  qden_dataset* ds = small_dataset();
  uint32_t qubits = 0;
  uint64_t samples = 0;
  REQUIRE(qden_dataset_info(ds, &qubits, &samples) == QDEN_OK);
  CHECK(qubits == 2);
  CHECK(samples == 120);
  CHECK(qden_dataset_validate(ds) == QDEN_OK);

  std::vector<double> clean(32), noisy(32);
  uint8_t kind = 9;
  double level = 0.0;
  uint64_t seed = 0;
  REQUIRE(qden_dataset_sample(ds, 5, &kind, &level, &seed, clean.data(), noisy.data()) == QDEN_OK);
  CHECK(kind == 1);
  CHECK(level == 0.10);
  CHECK(std::abs(clean[0] + clean[10] + clean[20] + clean[30] - 1.0) <= 1e-12);
  CHECK(qden_dataset_sample(ds, 120, nullptr, nullptr, nullptr, nullptr, nullptr) == QDEN_INVALID_ARGUMENT);

  const auto path = tmp / "d.qds";
  REQUIRE(qden_dataset_write(ds, path.c_str()) == QDEN_OK);
  qden_dataset* back = nullptr;
  REQUIRE(qden_dataset_read(path.c_str(), &back) == QDEN_OK);
  std::vector<double> clean2(32);
  REQUIRE(qden_dataset_sample(back, 5, nullptr, nullptr, nullptr, clean2.data(), nullptr) == QDEN_OK);
  CHECK(clean2 == clean);

  char* manifest = nullptr;
  REQUIRE(qden_dataset_manifest_json(back, &manifest) == QDEN_OK);
  CHECK(nlohmann::json::parse(take(manifest))["num_samples"] == 120);
  char* stats = nullptr;
  REQUIRE(qden_dataset_statistics_json(back, &stats) == QDEN_OK);
  CHECK(nlohmann::json::parse(take(stats))["cells"].size() == 20);

  qden_dataset* missing = nullptr;
  CHECK(qden_dataset_read((tmp / "none.qds").c_str(), &missing) == QDEN_IO);
  CHECK(missing == nullptr);
  CHECK(qden_dataset_info(nullptr, &qubits, &samples) == QDEN_INVALID_ARGUMENT);

  qden_dataset* invalid = nullptr;
  CHECK(qden_dataset_generate(R"({"dataset":{"levels":[1.5]}})", &invalid) == QDEN_INVALID_ARGUMENT);
  CHECK(invalid == nullptr);

  qden_dataset_free(back);
  qden_dataset_free(ds);
  qden_dataset_free(nullptr);
}

namespace {

void count_epochs(const char* line, void* user) {
  auto* lines = static_cast<std::vector<std::string>*>(user);
  lines->push_back(line);
}

}  // namespace

TEST_CASE("train, save, load, denoise, evaluate") {
  Scratch tmp;
  qden_dataset* ds = small_dataset();
  std::vector<std::string> lines;
  qden_model* model = nullptr;
  char* summary = nullptr;
  REQUIRE(qden_train(ds, kSmallTrain, count_epochs, &lines, &model, &summary) == QDEN_OK);
  CHECK(lines.size() == 3);
  CHECK(nlohmann::json::parse(lines[0])["epoch"] == 1);
  const auto s = nlohmann::json::parse(take(summary));
  CHECK(s["test_samples"] == 24);
  CHECK(s["epochs_run"] == 3);
  CHECK(s["split"]["test_fraction"] == 0.2);

  const auto path = tmp / "m.qnn";
  REQUIRE(qden_model_save(model, path.c_str()) == QDEN_OK);
  char* cfg = nullptr;
  REQUIRE(qden_model_config_json(model, &cfg) == QDEN_OK);
  const std::string cfg_text = take(cfg);

  qden_model* loaded = nullptr;
  REQUIRE(qden_model_load(path.c_str(), cfg_text.c_str(), &loaded) == QDEN_OK);
  char* meta = nullptr;
  REQUIRE(qden_model_metadata_json(loaded, &meta) == QDEN_OK);
  CHECK(nlohmann::json::parse(take(meta))["num_qubits"] == 2);

  qden_model* wrong = nullptr;
  CHECK(qden_model_load(path.c_str(), R"({"dim":4,"filters":[4,4]})", &wrong) == QDEN_CONFIG_MISMATCH);
  CHECK(wrong == nullptr);

  std::vector<double> noisy(32), out(32);
  REQUIRE(qden_dataset_sample(ds, 0, nullptr, nullptr, nullptr, nullptr, noisy.data()) == QDEN_OK);
  REQUIRE(qden_model_denoise(loaded, noisy.data(), 4, out.data()) == QDEN_OK);
  CHECK(std::abs(out[0] + out[10] + out[20] + out[30] - 1.0) <= 1e-12);
  CHECK(qden_model_denoise(loaded, noisy.data(), 8, out.data()) == QDEN_CONFIG_MISMATCH);

  const auto reports = tmp / "reports";
  char* eval_summary = nullptr;
  REQUIRE(qden_evaluate(loaded, ds, reports.c_str(), &eval_summary) == QDEN_OK);
  const auto e = nlohmann::json::parse(take(eval_summary));
  CHECK(e["evaluated"].get<int>() + e["failed_count"].get<int>() == 24);
  CHECK(fs::exists(fs::path(reports) / "by_noise_type.csv"));
  CHECK(fs::exists(fs::path(reports) / "by_noise_level.csv"));
  CHECK(fs::exists(fs::path(reports) / "heatmaps" / "clean_real.pgm"));

  qden_dataset* other = nullptr;
  REQUIRE(qden_dataset_generate(R"({"dataset":{"num_qubits":3,"num_samples":40}})", &other) == QDEN_OK);
  CHECK(qden_evaluate(loaded, other, reports.c_str(), nullptr) == QDEN_CONFIG_MISMATCH);

  CHECK(qden_train(ds, R"({"model":{"dim":8}})", nullptr, nullptr, &wrong, nullptr) == QDEN_CONFIG_MISMATCH);
  CHECK(qden_model_load((tmp / "none.qnn").c_str(), nullptr, &wrong) == QDEN_IO);

  qden_dataset_free(other);
  qden_model_free(loaded);
  qden_model_free(model);
  qden_dataset_free(ds);
}
