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
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include <json.hpp>

#include "qden/dataset.hpp"
#include "qden/error.hpp"
#include "qden/metrics.hpp"
#include "test_util.hpp"

using namespace qden;
using qden::testing::TempDir;

namespace {

GenerateConfig small_config(std::uint64_t n = 40) {
  GenerateConfig cfg;
  cfg.num_samples = n;
  cfg.num_qubits = 2;
  cfg.threads = 1;
  return cfg;
}

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("generated samples are valid and balanced") {
  auto cfg = small_config(200);
  cfg.num_qubits = 3;
  const auto ds = generate_dataset(cfg);
  REQUIRE(ds.samples.size() == 200);
  CHECK_NOTHROW(validate_dataset(ds));
  std::map<std::pair<NoiseKind, double>, int> cells;
  for (const auto& rec : ds.samples) {
    CHECK(rec.clean.num_qubits == 3);
    CHECK(std::abs(purity(rec.clean) - 1.0) <= 1e-10);
    ++cells[{rec.noise_kind, rec.noise_level}];
  }
  CHECK(cells.size() == 20);
  for (const auto& [key, count] : cells) CHECK(count == 10);
}

TEST_CASE("generation is deterministic and thread independent") {
  auto cfg = small_config(37);
  const auto a = generate_dataset(cfg);
  cfg.threads = 4;
  const auto b = generate_dataset(cfg);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].sample_seed == b.samples[i].sample_seed);
    CHECK(a.samples[i].clean.mat == b.samples[i].clean.mat);
    CHECK(a.samples[i].noisy.mat == b.samples[i].noisy.mat);
  }
  const auto one = generate_sample(cfg, 17);
  CHECK(one.noisy.mat == a.samples[17].noisy.mat);

  cfg.global_seed = 43;
  CHECK_FALSE(generate_dataset(cfg).samples[0].clean.mat == a.samples[0].clean.mat);
}

TEST_CASE("generate config errors") {
  auto cfg = small_config();
  cfg.levels = {0.0};
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
  cfg = small_config();
  cfg.kinds.clear();
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
  cfg = small_config();
  cfg.depth_min = 9;
  cfg.depth_max = 6;
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
}

TEST_CASE("qds round trip") {
  TempDir dir("qds");
  const auto ds = generate_dataset(small_config(25));
  const auto path = dir / "d.qds";
  write_qds(ds, path);
  CHECK(std::filesystem::file_size(path) == 24 + 25 * (24 + 2 * 16 * 16));
  CHECK(std::filesystem::exists(manifest_path(path)));

  const auto back = read_qds(path);
  CHECK(back.manifest.num_qubits == 2);
  CHECK(back.manifest.dim == 4);
  CHECK(back.manifest.num_samples == 25);
  CHECK(back.manifest.global_seed == 42);
  CHECK(back.manifest.kinds == ds.manifest.kinds);
  CHECK(back.manifest.levels == ds.manifest.levels);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(back.samples[i].noise_kind == ds.samples[i].noise_kind);
    CHECK(back.samples[i].noise_level == ds.samples[i].noise_level);
    CHECK(back.samples[i].sample_seed == ds.samples[i].sample_seed);
    CHECK(back.samples[i].clean.mat == ds.samples[i].clean.mat);
    CHECK(back.samples[i].noisy.mat == ds.samples[i].noisy.mat);
  }

  const auto again = dir / "e.qds";
  write_qds(back, again);
  CHECK(slurp(path) == slurp(again));

  const auto manifest = nlohmann::json::parse(slurp(manifest_path(path)));
  CHECK(manifest.at("num_samples") == 25);
  CHECK(manifest.at("kinds").size() == 5);
}

TEST_CASE("qds header layout") {
  TempDir dir("hdr");
  const auto path = dir / "d.qds";
  write_qds(generate_dataset(small_config(3)), path);
  const auto bytes = slurp(path);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "QDS1");
  auto u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes[at + k]);
    return v;
  };
  CHECK(u32(4) == 1);
  CHECK(u32(8) == 2);
  CHECK(u32(12) == 4);
  CHECK(u32(16) == 3);
  CHECK(u32(20) == 0);
  // First record: kind byte then seven zero pad bytes.
  CHECK(static_cast<unsigned char>(bytes[24]) == 0);
  for (int k = 25; k < 32; ++k) CHECK(bytes[k] == 0);
}

TEST_CASE("qds format errors") {
  TempDir dir("bad");
  const auto path = dir / "d.qds";
  write_qds(generate_dataset(small_config(5)), path);
  const auto good = slurp(path);
  std::filesystem::remove(manifest_path(path));

  SUBCASE("bad magic reports the offending byte") {
    auto bytes = good;
    bytes[2] = 'X';
    spit(path, bytes);
    try {
      read_qds(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 2);
    }
  }
  SUBCASE("truncation names the record") {
    const std::size_t rec = 24 + 2 * 16 * 16;
    auto bytes = good;
    bytes.resize(24 + 3 * rec + 10);
    spit(path, bytes);
    try {
      read_qds(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.record() == 3);
      CHECK(e.offset() == 24 + 3 * rec + 10);
      CHECK(std::string(e.what()).find("record 3") != std::string::npos);
    }
  }
  SUBCASE("unknown kind code") {
    auto bytes = good;
    bytes[24] = 9;
    spit(path, bytes);
    CHECK_THROWS_AS(read_qds(path), FormatError);
  }
  SUBCASE("wrong version") {
    auto bytes = good;
    bytes[4] = 2;
    spit(path, bytes);
    CHECK_THROWS_AS(read_qds(path), FormatError);
  }
  SUBCASE("trailing bytes") {
    auto bytes = good;
    bytes.push_back(0);
    spit(path, bytes);
    CHECK_THROWS_AS(read_qds(path), FormatError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(read_qds(dir / "nope.qds"), IoError); }
  SUBCASE("without a manifest the kinds come from the records") {
    const auto ds = read_qds(path);
    CHECK(ds.manifest.kinds == std::vector<NoiseKind>{NoiseKind::kBitflip, NoiseKind::kDepolarizing});
    CHECK(ds.manifest.levels.size() == 4);
  }
}

TEST_CASE("stratified split") {
  const auto ds = generate_dataset(small_config(200));
  const auto split = split_train_test(ds, 0.2, 1234);
  CHECK(split.test.size() == 40);
  CHECK(split.train.size() == 160);
  CHECK(std::is_sorted(split.train.begin(), split.train.end()));
  CHECK(std::is_sorted(split.test.begin(), split.test.end()));

  std::set<std::size_t> all(split.train.begin(), split.train.end());
  for (auto i : split.test) CHECK(all.insert(i).second);
  CHECK(all.size() == 200);

  std::map<std::pair<NoiseKind, double>, int> test_cells;
  for (auto i : split.test) ++test_cells[{ds.samples[i].noise_kind, ds.samples[i].noise_level}];
  CHECK(test_cells.size() == 20);
  for (const auto& [key, count] : test_cells) CHECK(count == 2);

  const auto again = split_train_test(ds, 0.2, 1234);
  CHECK(again.test == split.test);
  CHECK_FALSE(split_train_test(ds, 0.2, 99).test == split.test);
}

TEST_CASE("split rounding and errors") {
  const auto ds = generate_dataset(small_config(23));
  const auto split = split_train_test(ds, 0.3, 5);
  CHECK(split.test.size() == 7);
  CHECK(split.train.size() == 16);

  CHECK_THROWS_AS(split_train_test(ds, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(split_train_test(ds, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(split_train_test(ds, 0.01, 1), InvalidArgument);
  CHECK_THROWS_AS(split_train_test(ds, 0.99, 1), InvalidArgument);

  const std::vector<std::size_t> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto sub = split_indices(ds, pool, 0.2, 3);
  CHECK(sub.test.size() == 2);
  for (auto i : sub.train) CHECK(i < 10);
}

TEST_CASE("density matrix channel layout") {
  CMat m(2, 2);
  m(0, 0) = Complex(0.6, 0.0);
  m(0, 1) = Complex(0.1, -0.2);
  m(1, 0) = Complex(0.1, 0.2);
  m(1, 1) = Complex(0.4, 0.0);
  const auto t = dm_to_channels(m);
  CHECK(t.shape() == std::vector<std::size_t>{2, 2, 2});
  CHECK(t.data()[2] == 0.1);
  CHECK(t.data()[3] == -0.2);
  CHECK(t.data()[5] == 0.2);
  CHECK(channels_to_dm(t) == m);
  CHECK_THROWS_AS(channels_to_dm(Tensor({2, 2, 3})), InvalidArgument);

  Tensor batch({2, 2, 2, 2});
  std::copy(t.data().begin(), t.data().end(), batch.data().begin() + 8);
  CHECK(batch_item_to_matrix(batch, 1) == m);
  CHECK_THROWS_AS(batch_item_to_matrix(batch, 2), InvalidArgument);
}
