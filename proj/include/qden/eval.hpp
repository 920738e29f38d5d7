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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qden/dataset.hpp"
#include "qden/model.hpp"

namespace qden::eval {

struct FidelityReportRow {
  std::string group;
  double noisy_fidelity = 0.0;
  double corrected_fidelity = 0.0;
  double improvement = 0.0;  // corrected - noisy
  std::size_t count = 0;
};

struct SampleEvaluation {
  std::size_t index = 0;
  NoiseKind kind = NoiseKind::kBitflip;
  double level = 0.0;
  double noisy_fidelity = 0.0;
  double corrected_fidelity = 0.0;
  double improvement = 0.0;
};

struct EvalSummary {
  std::vector<FidelityReportRow> by_kind;
  std::vector<FidelityReportRow> by_level;
  double mean_noisy = 0.0;
  double mean_corrected = 0.0;
  double mean_improvement = 0.0;
  /// Pearson correlation of noise level against noisy fidelity; NaN when
  /// either side has zero variance.
  double level_fidelity_correlation = 0.0;
  std::vector<std::size_t> negative_improvement_indices;
  /// Samples whose prediction could not be projected onto a state.
  std::vector<std::size_t> failed_indices;
  std::vector<SampleEvaluation> samples;
};

/// Maps a sample to an unconstrained matrix estimate of its clean state.
using Corrector = std::function<CMat(const SampleRecord&)>;

/// Returns the noisy state unchanged.
Corrector identity_corrector();
/// Returns the clean state (upper-bound baseline).
Corrector oracle_corrector();
/// Eval-mode autoencoder; the references must outlive the corrector.
Corrector model_corrector(const nn::ModelParams& params, const nn::ModelConfig& config);

/// Per sample: corrector -> project_to_dm -> Uhlmann fidelity against the
/// clean state, next to the noisy state's fidelity. Projection failures are
/// listed in failed_indices and left out of every mean.
EvalSummary evaluate_corrections(const Dataset& dataset, std::span<const std::size_t> indices,
                                 const Corrector& corrector);

/// Pearson correlation. Throws InvalidArgument for unequal or short inputs
/// and NumericError when either side has zero variance.
double correlation(std::span<const double> xs, std::span<const double> ys);

/// by_noise_type.csv and by_noise_level.csv (3 decimals) plus summary.json at
/// full precision. Files are written as *.partial and renamed when complete.
void export_reports(const EvalSummary& summary, const std::filesystem::path& out_dir);

/// Six P5 PGMs ({clean,noisy,corrected}_{real,imag}.pgm), each mapping
/// [-maxabs, +maxabs] linearly onto [0, 255], plus heatmaps.json with the
/// per-image maxabs.
void export_heatmaps(const SampleRecord& sample, const DensityMatrix& corrected, const std::filesystem::path& out_dir);

/// Grey level for `value` on a [-maxabs, +maxabs] scale; 128 when maxabs is 0.
std::uint8_t heatmap_level(double value, double maxabs);

struct CellStatistics {
  NoiseKind kind = NoiseKind::kBitflip;
  double level = 0.0;
  std::size_t count = 0;
  double mean_noisy_fidelity = 0.0;
  double mean_noisy_purity = 0.0;
};

struct DatasetStatistics {
  std::vector<CellStatistics> cells;
  std::vector<FidelityReportRow> by_kind;  // corrected columns unused
  double level_fidelity_correlation = 0.0; // NaN when undefined
};

/// Noisy-vs-clean fidelity statistics for the whole dataset.
DatasetStatistics dataset_statistics(const Dataset& dataset);
std::string to_json(const DatasetStatistics& stats);
std::string to_json(const EvalSummary& summary);

}  // namespace qden::eval
