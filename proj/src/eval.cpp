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

#include "qden/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qden/error.hpp"
#include "qden/metrics.hpp"
#include "qden/train.hpp"

namespace qden::eval {
namespace {

using ordered_json = nlohmann::ordered_json;

struct Accumulator {
  double noisy = 0.0;
  double corrected = 0.0;
  std::size_t count = 0;
};

FidelityReportRow finish(const std::string& group, const Accumulator& acc) {
  FidelityReportRow row;
  row.group = group;
  row.count = acc.count;
  if (acc.count) {
    row.noisy_fidelity = acc.noisy / static_cast<double>(acc.count);
    row.corrected_fidelity = acc.corrected / static_cast<double>(acc.count);
  }
  row.improvement = row.corrected_fidelity - row.noisy_fidelity;
  return row;
}

std::string level_label(double level) {
  std::ostringstream os;
  os << level;
  return os.str();
}

double correlation_or_nan(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 2) return NAN;
  try {
    return correlation(xs, ys);
  } catch (const NumericError&) {
    return NAN;
  }
}

ordered_json row_json(const FidelityReportRow& r) {
  ordered_json j;
  j["group"] = r.group;
  j["noisy_fidelity"] = r.noisy_fidelity;
  j["corrected_fidelity"] = r.corrected_fidelity;
  j["improvement"] = r.improvement;
  j["count"] = r.count;
  return j;
}

ordered_json nullable(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

// Published 5-qubit results, kept for side-by-side trend comparison only.
ordered_json published_reference() {
  auto row = [](const char* group, double noisy, double corrected, double improvement) {
    ordered_json j;
    j["group"] = group;
    j["noisy_fidelity"] = noisy;
    j["corrected_fidelity"] = corrected;
    j["improvement"] = improvement;
    return j;
  };
  ordered_json ref;
  ref["note"] = "published 5-qubit, 10000-sample results; trend comparison only";
  ref["by_noise_type"] = ordered_json::array({
      row("amplitude_damping", 0.293, 0.788, 0.495),
      row("bitflip", 0.200, 0.745, 0.545),
      row("depolarizing", 0.215, 0.742, 0.526),
      row("mixed", 0.240, 0.807, 0.567),
      row("phase_damping", 0.541, 0.783, 0.241),
  });
  ref["by_noise_level"] = ordered_json::array({
      row("0.05", 0.429, 0.824, 0.396),
      row("0.1", 0.302, 0.769, 0.467),
      row("0.15", 0.199, 0.744, 0.544),
      row("0.2", 0.192, 0.745, 0.553),
  });
  ref["overall"] = row("all", 0.298, 0.774, 0.47);
  ref["level_fidelity_correlation"] = -0.55;
  return ref;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents, bool binary = false) {
  auto partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw IoError("cannot open " + partial.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write to " + partial.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw IoError("cannot rename " + partial.string() + ": " + ec.message());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

std::string rows_csv(const std::vector<FidelityReportRow>& rows) {
  std::string out = "group,noisy_fidelity,corrected_fidelity,improvement\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%s,%.3f,%.3f,%.3f\n", r.group.c_str(), r.noisy_fidelity, r.corrected_fidelity,
                  r.improvement);
    out += line;
  }
  return out;
}

double max_abs(const CMat& m, bool imag) {
  double v = 0.0;
  for (const auto& z : m.data()) v = std::max(v, std::abs(imag ? z.imag() : z.real()));
  return v;
}

std::string pgm(const CMat& m, bool imag, double maxabs) {
  std::string out = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      out.push_back(static_cast<char>(heatmap_level(imag ? m(r, c).imag() : m(r, c).real(), maxabs)));
  return out;
}

}  // namespace

Corrector identity_corrector() {
  return [](const SampleRecord& rec) { return rec.noisy.mat; };
}

Corrector oracle_corrector() {
  return [](const SampleRecord& rec) { return rec.clean.mat; };
}

Corrector model_corrector(const nn::ModelParams& params, const nn::ModelConfig& config) {
  return [&params, &config](const SampleRecord& rec) {
    const Tensor channels = dm_to_channels(rec.noisy.mat);
    const Tensor x({1, rec.noisy.dim(), rec.noisy.dim(), 2},
                   std::vector<double>(channels.data().begin(), channels.data().end()));
    const auto trace = nn::model_forward(params, config, x, /*train_mode=*/false);
    return batch_item_to_matrix(trace.output, 0);
  };
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("correlation: length mismatch");
  if (xs.size() < 2) throw InvalidArgument("correlation: need at least two pairs");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("correlation: zero variance, result undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

EvalSummary evaluate_corrections(const Dataset& dataset, std::span<const std::size_t> indices,
                                 const Corrector& corrector) {
  if (indices.empty()) throw InvalidArgument("evaluate_corrections: test set is empty");
  EvalSummary s;
  std::map<std::uint8_t, Accumulator> by_kind;
  std::map<double, Accumulator> by_level;
  Accumulator all;
  std::vector<double> levels, noisy;

  for (std::size_t idx : indices) {
    if (idx >= dataset.samples.size()) throw InvalidArgument("evaluate_corrections: index out of range");
    const auto& rec = dataset.samples[idx];
    DensityMatrix corrected;
    try {
      corrected = project_to_dm(corrector(rec));
    } catch (const NumericError&) {
      s.failed_indices.push_back(idx);
      continue;
    }
    SampleEvaluation e;
    e.index = idx;
    e.kind = rec.noise_kind;
    e.level = rec.noise_level;
    e.noisy_fidelity = uhlmann_fidelity(rec.clean, rec.noisy);
    e.corrected_fidelity = uhlmann_fidelity(rec.clean, corrected);
    e.improvement = e.corrected_fidelity - e.noisy_fidelity;
    if (e.improvement < 0.0) s.negative_improvement_indices.push_back(idx);
    for (Accumulator* acc : {&by_kind[static_cast<std::uint8_t>(e.kind)], &by_level[e.level], &all}) {
      acc->noisy += e.noisy_fidelity;
      acc->corrected += e.corrected_fidelity;
      ++acc->count;
    }
    levels.push_back(e.level);
    noisy.push_back(e.noisy_fidelity);
    s.samples.push_back(e);
  }

  for (const auto& [code, acc] : by_kind)
    s.by_kind.push_back(finish(std::string(noise_kind_name(static_cast<NoiseKind>(code))), acc));
  for (const auto& [level, acc] : by_level) s.by_level.push_back(finish(level_label(level), acc));
  const auto overall = finish("all", all);
  s.mean_noisy = overall.noisy_fidelity;
  s.mean_corrected = overall.corrected_fidelity;
  s.mean_improvement = overall.improvement;
  s.level_fidelity_correlation = correlation_or_nan(levels, noisy);
  return s;
}

std::string to_json(const EvalSummary& s) {
  ordered_json j;
  j["evaluated"] = s.samples.size();
  j["mean_noisy_fidelity"] = s.mean_noisy;
  j["mean_corrected_fidelity"] = s.mean_corrected;
  j["mean_improvement"] = s.mean_improvement;
  j["level_fidelity_correlation"] = nullable(s.level_fidelity_correlation);
  j["fidelity_convention"] = "squared Uhlmann: (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2";
  auto rows = [](const std::vector<FidelityReportRow>& v) {
    auto a = ordered_json::array();
    for (const auto& r : v) a.push_back(row_json(r));
    return a;
  };
  j["by_noise_type"] = rows(s.by_kind);
  j["by_noise_level"] = rows(s.by_level);
  j["negative_improvement_count"] = s.negative_improvement_indices.size();
  j["negative_improvement_indices"] = s.negative_improvement_indices;
  j["failed_count"] = s.failed_indices.size();
  j["failed_indices"] = s.failed_indices;
  j["published_reference"] = published_reference();
  return j.dump(2) + "\n";
}

void export_reports(const EvalSummary& summary, const std::filesystem::path& out_dir) {
  if (summary.samples.empty()) throw InvalidArgument("export_reports: summary covers no samples");
  ensure_dir(out_dir);
  write_atomically(out_dir / "by_noise_type.csv", rows_csv(summary.by_kind));
  write_atomically(out_dir / "by_noise_level.csv", rows_csv(summary.by_level));
  write_atomically(out_dir / "summary.json", to_json(summary));
}

std::uint8_t heatmap_level(double value, double maxabs) {
  if (!(maxabs > 0.0)) return 128;
  const double scaled = (value + maxabs) / (2.0 * maxabs) * 255.0;
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(scaled), 0, 255));
}

void export_heatmaps(const SampleRecord& sample, const DensityMatrix& corrected, const std::filesystem::path& out_dir) {
  if (sample.clean.dim() != sample.noisy.dim() || corrected.dim() != sample.clean.dim()) {
    throw InvalidArgument("export_heatmaps: inconsistent state dimensions");
  }
  ensure_dir(out_dir);
  ordered_json sidecar;
  sidecar["mapping"] = "grey = round((value + maxabs) / (2 maxabs) * 255); 128 everywhere when maxabs = 0";
  sidecar["noise_kind"] = std::string(noise_kind_name(sample.noise_kind));
  sidecar["noise_level"] = sample.noise_level;
  sidecar["sample_seed"] = sample.sample_seed;
  auto images = ordered_json::array();
  const std::pair<const char*, const CMat*> states[] = {
      {"clean", &sample.clean.mat}, {"noisy", &sample.noisy.mat}, {"corrected", &corrected.mat}};
  for (const auto& [name, mat] : states) {
    for (bool imag : {false, true}) {
      const std::string file = std::string(name) + (imag ? "_imag" : "_real") + ".pgm";
      const double scale = max_abs(*mat, imag);
      write_atomically(out_dir / file, pgm(*mat, imag, scale), true);
      ordered_json entry;
      entry["file"] = file;
      entry["state"] = name;
      entry["part"] = imag ? "imag" : "real";
      entry["maxabs"] = scale;
      images.push_back(entry);
    }
  }
  sidecar["images"] = images;
  write_atomically(out_dir / "heatmaps.json", sidecar.dump(2) + "\n");
}

DatasetStatistics dataset_statistics(const Dataset& dataset) {
  struct CellAcc {
    double fidelity = 0.0;
    double purity = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::uint8_t, double>, CellAcc> cells;
  std::map<std::uint8_t, Accumulator> kinds;
  std::vector<double> levels, fids;
  levels.reserve(dataset.samples.size());
  fids.reserve(dataset.samples.size());
  for (const auto& rec : dataset.samples) {
    const double f = uhlmann_fidelity(rec.clean, rec.noisy);
    auto& c = cells[{static_cast<std::uint8_t>(rec.noise_kind), rec.noise_level}];
    c.fidelity += f;
    c.purity += purity(rec.noisy);
    ++c.count;
    auto& k = kinds[static_cast<std::uint8_t>(rec.noise_kind)];
    k.noisy += f;
    ++k.count;
    levels.push_back(rec.noise_level);
    fids.push_back(f);
  }
  DatasetStatistics stats;
  for (const auto& [key, c] : cells) {
    stats.cells.push_back({static_cast<NoiseKind>(key.first), key.second, c.count,
                           c.fidelity / static_cast<double>(c.count), c.purity / static_cast<double>(c.count)});
  }
  for (const auto& [code, acc] : kinds) {
    auto row = finish(std::string(noise_kind_name(static_cast<NoiseKind>(code))), acc);
    row.corrected_fidelity = 0.0;
    row.improvement = 0.0;
    stats.by_kind.push_back(row);
  }
  stats.level_fidelity_correlation = correlation_or_nan(levels, fids);
  return stats;
}

std::string to_json(const DatasetStatistics& stats) {
  ordered_json j;
  auto cells = ordered_json::array();
  for (const auto& c : stats.cells) {
    ordered_json e;
    e["kind"] = std::string(noise_kind_name(c.kind));
    e["level"] = c.level;
    e["count"] = c.count;
    e["mean_noisy_fidelity"] = c.mean_noisy_fidelity;
    e["mean_noisy_purity"] = c.mean_noisy_purity;
    cells.push_back(e);
  }
  j["cells"] = cells;
  auto kinds = ordered_json::array();
  for (const auto& r : stats.by_kind) {
    ordered_json e;
    e["kind"] = r.group;
    e["count"] = r.count;
    e["mean_noisy_fidelity"] = r.noisy_fidelity;
    kinds.push_back(e);
  }
  j["by_noise_type"] = kinds;
  j["level_fidelity_correlation"] = nullable(stats.level_fidelity_correlation);
  return j.dump(2) + "\n";
}

}  // namespace qden::eval
