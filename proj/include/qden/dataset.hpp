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
#include <span>
#include <string>
#include <vector>

#include "qden/noise.hpp"
#include "qden/quantum.hpp"
#include "qden/tensor.hpp"

namespace qden {

struct SampleRecord {
  DensityMatrix clean;
  DensityMatrix noisy;
  NoiseKind noise_kind = NoiseKind::kBitflip;
  double noise_level = 0.0;
  std::uint64_t sample_seed = 0;
};

inline constexpr std::uint32_t kQdsVersion = 1;

struct DatasetManifest {
  std::uint32_t num_qubits = 0;
  std::uint32_t dim = 0;
  std::uint64_t num_samples = 0;
  std::vector<double> levels;
  std::vector<NoiseKind> kinds;
  std::uint64_t global_seed = 0;
  std::uint32_t version = kQdsVersion;
  std::uint32_t depth_min = 0;
  std::uint32_t depth_max = 0;
  std::string created_at;  // ISO-8601 UTC
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<SampleRecord> samples;
};

struct GenerateConfig {
  std::uint64_t num_samples = 10000;
  std::uint32_t num_qubits = 5;
  std::uint32_t depth_min = 6;
  std::uint32_t depth_max = 9;
  std::vector<NoiseKind> kinds{std::begin(kAllNoiseKinds), std::end(kAllNoiseKinds)};
  std::vector<double> levels{std::begin(kDefaultNoiseLevels), std::end(kDefaultNoiseLevels)};
  std::uint64_t global_seed = 42;
  /// Worker count; 0 means hardware concurrency. Output does not depend on it.
  unsigned threads = 0;
};

/// Sample i uses seed derive_seed(global_seed, i) for its circuit and
/// derive_seed(that, 1) for mixed-noise draws. Cell i mod (|kinds| * |levels|)
/// picks (kinds[cell / |levels|], levels[cell % |levels|]).
Dataset generate_dataset(const GenerateConfig& config);

/// One sample, exactly as generate_dataset would produce it at `index`.
SampleRecord generate_sample(const GenerateConfig& config, std::uint64_t index);

/// QDS1 binary container (little-endian):
///   header: "QDS1" | version u32 | num_qubits u32 | dim u32 | num_samples u64
///   record: kind u8 | 7 zero bytes | level f64 | sample_seed u64 |
///           clean (dim^2 x {re f64, im f64}, row-major) | noisy (same)
/// The manifest JSON goes to `manifest_path(path)`.
void write_qds(const Dataset& dataset, const std::filesystem::path& path);

/// Throws FormatError naming the byte offset (and record index for record
/// failures) on bad magic, version, truncation or trailing bytes. Manifest
/// fields absent from the binary come from the sidecar when present, else
/// are derived from the records.
Dataset read_qds(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& qds_path);
std::string manifest_to_json(const DatasetManifest& manifest);

/// Checks every stored state against the density-matrix invariants; throws
/// InvalidArgument naming the first offending sample.
void validate_dataset(const Dataset& dataset, double tol = 1e-10);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified per (kind, level) cell. round(N * fraction) samples go to the
/// test side; each cell gets floor(n_c * fraction) plus one extra for the
/// cells with the largest remainders. Within a cell the order is a seeded
/// shuffle. Both outputs are sorted.
TrainTestSplit split_indices(const Dataset& dataset, std::span<const std::size_t> pool, double test_fraction,
                             std::uint64_t split_seed);
TrainTestSplit split_train_test(const Dataset& dataset, double test_fraction, std::uint64_t split_seed);

/// (dim, dim, 2): channel 0 real part, channel 1 imaginary part.
Tensor dm_to_channels(const CMat& rho);
CMat channels_to_dm(const Tensor& t);

/// Copies sample `n` of a (N, dim, dim, 2) batch into a (dim, dim) matrix.
CMat batch_item_to_matrix(const Tensor& batch, std::size_t n);

}  // namespace qden
