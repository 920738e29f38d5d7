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

// qden command-line tool: generate, train, eval, inspect.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qden/qden.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const char* const kKindNames[] = {"bitflip", "depolarizing", "amplitude_damping", "phase_damping", "mixed"};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(qden_status status, const std::string& what) {
  if (status != QDEN_OK) throw Failure(what + ": " + qden_last_error());
}

struct DatasetDeleter {
  void operator()(qden_dataset* p) const { qden_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(qden_model* p) const { qden_model_free(p); }
};
using DatasetPtr = std::unique_ptr<qden_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<qden_model, ModelDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  qden_string_free(s);
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  auto out = p;
  out += suffix;
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  const auto partial = with_suffix(path, ".partial");
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure("cannot write " + partial.string());
    out << text;
    if (!out.flush()) throw Failure("write to " + partial.string() + " failed");
  }
  fs::rename(partial, path);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void remove_quietly(const fs::path& p) {
  std::error_code ec;
  fs::remove(p, ec);
}

DatasetPtr read_dataset(const std::string& path) {
  qden_dataset* ds = nullptr;
  check(qden_dataset_read(path.c_str(), &ds), "reading " + path);
  return DatasetPtr(ds);
}

std::string resolve_config(const std::vector<std::string>& layers) {
  std::vector<const char*> raw;
  for (const auto& l : layers) raw.push_back(l.c_str());
  char* out = nullptr;
  check(qden_config_resolve(raw.data(), raw.size(), &out), "configuration");
  return take(out);
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

unsigned threads_from_env() {
  const char* env = std::getenv("QDEN_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw UsageError("QDEN_THREADS must be a non-negative integer, got '" + std::string(env) + "'");
  return static_cast<unsigned>(v);
}

json kinds_json(const std::string& spec) {
  if (spec == "all") return "all";
  json out = json::array();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("--kinds: empty entry in '" + spec + "'");
    out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string config, out, kinds;
  std::uint32_t qubits = 0, depth_min = 0, depth_max = 0;
  std::uint64_t samples = 0, seed = 0;
  std::vector<double> levels;
  unsigned threads = 0;
};

int run_generate(const GenerateArgs& a, const CLI::App& cmd) {
  json flags;
  auto& d = flags["dataset"];
  if (cmd.count("--qubits")) d["num_qubits"] = a.qubits;
  if (cmd.count("--samples")) d["num_samples"] = a.samples;
  if (cmd.count("--depth-min")) d["depth_min"] = a.depth_min;
  if (cmd.count("--depth-max")) d["depth_max"] = a.depth_max;
  if (cmd.count("--kinds")) d["kinds"] = kinds_json(a.kinds);
  if (cmd.count("--levels")) d["levels"] = a.levels;
  if (cmd.count("--seed")) d["global_seed"] = a.seed;
  if (cmd.count("--threads")) d["threads"] = a.threads;
  else if (const unsigned env = threads_from_env()) d["threads"] = env;
  flags["paths"]["out"] = a.out;

  std::vector<std::string> layers;
  if (!a.config.empty()) layers.push_back(read_text(a.config));
  layers.push_back(flags.dump());
  const std::string resolved = resolve_config(layers);

  qden_dataset* raw = nullptr;
  check(qden_dataset_generate(resolved.c_str(), &raw), "generate");
  DatasetPtr ds(raw);

  const fs::path out(a.out);
  ensure_parent(out);
  const auto partial = with_suffix(out, ".partial");
  try {
    check(qden_dataset_write(ds.get(), partial.string().c_str()), "writing " + partial.string());
    fs::rename(with_suffix(partial, ".manifest.json"), with_suffix(out, ".manifest.json"));
    fs::rename(partial, out);
  } catch (...) {
    remove_quietly(partial);
    remove_quietly(with_suffix(partial, ".manifest.json"));
    throw;
  }
  write_text(with_suffix(out, ".config.json"), resolved);

  std::uint32_t qubits = 0;
  std::uint64_t samples = 0;
  check(qden_dataset_info(ds.get(), &qubits, &samples), "dataset info");
  std::map<std::pair<int, double>, std::uint64_t> cells;
  for (std::uint64_t i = 0; i < samples; ++i) {
    std::uint8_t kind = 0;
    double level = 0.0;
    check(qden_dataset_sample(ds.get(), i, &kind, &level, nullptr, nullptr, nullptr), "dataset sample");
    ++cells[{kind, level}];
  }
  std::cout << "wrote " << samples << " samples (" << qubits << " qubits) to " << out.string() << "\n";
  std::cout << "kind                level   count\n";
  for (const auto& [key, count] : cells) {
    std::printf("%-19s %-7s %llu\n", kKindNames[key.first], fmt("%g", key.second).c_str(),
                static_cast<unsigned long long>(count));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config, data, out, log;
  std::uint32_t epochs = 0, batch_size = 0;
  double lr = 0.0, lambda = 0.0, dropout = 0.0, test_fraction = 0.0;
  std::uint64_t seed = 0, split_seed = 0;
  std::vector<std::uint32_t> filters;
  bool quiet = false;
};

struct EpochSink {
  std::ofstream* log;
  bool quiet;
};

void on_epoch(const char* line, void* user) {
  auto* sink = static_cast<EpochSink*>(user);
  *sink->log << line << "\n";
  sink->log->flush();
  if (sink->quiet) return;
  const auto j = json::parse(line);
  std::printf("epoch %3u  loss %.4f  mae %.4f  val_loss %.4f  val_mae %.4f  lr %.2e  %.1fs\n",
              j["epoch"].get<unsigned>(), j["train_loss"].get<double>(), j["train_mae"].get<double>(),
              j["val_loss"].get<double>(), j["val_mae"].get<double>(), j["lr"].get<double>(),
              j["seconds"].get<double>());
  std::fflush(stdout);
}

int run_train(const TrainArgs& a, const CLI::App& cmd) {
  json flags;
  if (cmd.count("--epochs")) flags["train"]["epochs"] = a.epochs;
  if (cmd.count("--batch-size")) flags["train"]["batch_size"] = a.batch_size;
  if (cmd.count("--lr")) flags["train"]["initial_lr"] = a.lr;
  if (cmd.count("--seed")) {
    flags["train"]["shuffle_seed"] = a.seed;
    flags["train"]["init_seed"] = a.seed;
  }
  if (cmd.count("--lambda")) flags["model"]["lambda"] = a.lambda;
  if (cmd.count("--dropout")) flags["model"]["dropout"] = a.dropout;
  if (cmd.count("--filters")) flags["model"]["filters"] = a.filters;
  if (cmd.count("--test-fraction")) flags["split"]["test_fraction"] = a.test_fraction;
  if (cmd.count("--split-seed")) flags["split"]["split_seed"] = a.split_seed;
  const fs::path out(a.out);
  const fs::path log_path = a.log.empty() ? with_suffix(out, ".log.jsonl") : fs::path(a.log);
  flags["paths"]["data"] = a.data;
  flags["paths"]["model"] = a.out;
  flags["paths"]["log"] = log_path.string();

  auto ds = read_dataset(a.data);
  std::uint32_t qubits = 0;
  std::uint64_t samples = 0;
  check(qden_dataset_info(ds.get(), &qubits, &samples), "dataset info");
  flags["dataset"]["num_qubits"] = qubits;
  flags["dataset"]["num_samples"] = samples;

  std::vector<std::string> layers;
  if (!a.config.empty()) layers.push_back(read_text(a.config));
  layers.push_back(flags.dump());
  const std::string resolved = resolve_config(layers);

  ensure_parent(out);
  ensure_parent(log_path);
  const auto log_partial = with_suffix(log_path, ".partial");
  const auto model_partial = with_suffix(out, ".partial");
  try {
    std::ofstream log(log_partial, std::ios::trunc);
    if (!log) throw Failure("cannot write " + log_partial.string());
    EpochSink sink{&log, a.quiet};
    qden_model* raw = nullptr;
    char* summary = nullptr;
    check(qden_train(ds.get(), resolved.c_str(), on_epoch, &sink, &raw, &summary), "train");
    ModelPtr model(raw);
    const std::string summary_text = take(summary);
    log.close();
    check(qden_model_save(model.get(), model_partial.string().c_str()), "saving " + model_partial.string());
    fs::rename(model_partial, out);
    fs::rename(log_partial, log_path);
    write_text(with_suffix(out, ".summary.json"), summary_text);
    write_text(with_suffix(out, ".config.json"), resolved);

    const auto s = json::parse(summary_text);
    std::cout << "best epoch " << s["best_epoch"] << " of " << s["epochs_run"] << ", test loss "
              << fmt("%.4f", s["test_loss"].get<double>()) << ", test mae " << fmt("%.4f", s["test_mae"].get<double>())
              << "\nmodel written to " << out.string() << "\n";
  } catch (...) {
    remove_quietly(model_partial);
    remove_quietly(log_partial);
    throw;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string data, model, out;
};

int run_eval(const EvalArgs& a) {
  auto ds = read_dataset(a.data);
  qden_model* raw = nullptr;
  check(qden_model_load(a.model.c_str(), nullptr, &raw), "loading " + a.model);
  ModelPtr model(raw);

  const fs::path out(a.out);
  fs::create_directories(out);
  char* summary = nullptr;
  check(qden_evaluate(model.get(), ds.get(), out.string().c_str(), &summary), "eval");
  const auto s = json::parse(take(summary));

  char* cfg = nullptr;
  char* meta = nullptr;
  check(qden_model_config_json(model.get(), &cfg), "model config");
  check(qden_model_metadata_json(model.get(), &meta), "model metadata");
  json echo;
  echo["data"] = a.data;
  echo["model"] = a.model;
  echo["out"] = a.out;
  echo["model_config"] = json::parse(take(cfg));
  echo["model_metadata"] = json::parse(take(meta));
  write_text(out / "config.json", echo.dump(2) + "\n");

  auto table = [](const char* title, const json& rows) {
    std::printf("%s\n%-19s %8s %10s %12s %6s\n", title, "group", "noisy", "corrected", "improvement", "n");
    for (const auto& r : rows) {
      std::printf("%-19s %8.3f %10.3f %12.3f %6llu\n", r["group"].get<std::string>().c_str(),
                  r["noisy_fidelity"].get<double>(), r["corrected_fidelity"].get<double>(),
                  r["improvement"].get<double>(), static_cast<unsigned long long>(r["count"].get<std::uint64_t>()));
    }
  };
  table("by noise type", s["by_noise_type"]);
  table("by noise level", s["by_noise_level"]);
  std::printf("overall: noisy %.3f -> corrected %.3f (%+.3f) over %llu samples; %llu negative, %llu failed\n",
              s["mean_noisy_fidelity"].get<double>(), s["mean_corrected_fidelity"].get<double>(),
              s["mean_improvement"].get<double>(), static_cast<unsigned long long>(s["evaluated"].get<std::uint64_t>()),
              static_cast<unsigned long long>(s["negative_improvement_count"].get<std::uint64_t>()),
              static_cast<unsigned long long>(s["failed_count"].get<std::uint64_t>()));
  std::cout << "reports written to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// inspect

int run_inspect(const std::string& data, bool as_json) {
  auto ds = read_dataset(data);
  char* manifest = nullptr;
  char* stats = nullptr;
  check(qden_dataset_manifest_json(ds.get(), &manifest), "manifest");
  check(qden_dataset_statistics_json(ds.get(), &stats), "statistics");
  const auto m = json::parse(take(manifest));
  const auto s = json::parse(take(stats));
  if (as_json) {
    json out;
    out["manifest"] = m;
    out["statistics"] = s;
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "manifest\n" << m.dump(2) << "\n\n";
  std::printf("%-19s %-7s %6s %14s %13s\n", "kind", "level", "count", "noisy_fidelity", "noisy_purity");
  for (const auto& c : s["cells"]) {
    std::printf("%-19s %-7s %6llu %14.4f %13.4f\n", c["kind"].get<std::string>().c_str(),
                fmt("%g", c["level"].get<double>()).c_str(), static_cast<unsigned long long>(c["count"].get<std::uint64_t>()),
                c["mean_noisy_fidelity"].get<double>(), c["mean_noisy_purity"].get<double>());
  }
  std::printf("\n%-19s %14s\n", "kind", "noisy_fidelity");
  for (const auto& k : s["by_noise_type"])
    std::printf("%-19s %14.4f\n", k["kind"].get<std::string>().c_str(), k["mean_noisy_fidelity"].get<double>());
  const auto& corr = s["level_fidelity_correlation"];
  if (corr.is_null()) std::cout << "\ncorrelation(level, noisy fidelity): undefined (zero variance)\n";
  else std::printf("\ncorrelation(level, noisy fidelity): %.4f\n", corr.get<double>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate noisy quantum state datasets, train a denoising autoencoder, and report fidelities."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qden_version()));

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "simulate random circuits and write a QDS1 dataset");
  generate->add_option("--config", gen.config, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  generate->add_option("--qubits", gen.qubits, "qubits per circuit")->check(CLI::Range(2, 10));
  generate->add_option("--samples", gen.samples, "number of samples")->check(CLI::PositiveNumber);
  generate->add_option("--depth-min", gen.depth_min, "minimum circuit depth");
  generate->add_option("--depth-max", gen.depth_max, "maximum circuit depth");
  generate->add_option("--kinds", gen.kinds, "'all' or a comma list of noise kinds");
  generate->add_option("--levels", gen.levels, "comma list of noise levels")->delimiter(',');
  generate->add_option("--seed", gen.seed, "global seed");
  generate->add_option("--threads", gen.threads, "worker threads (default: $QDEN_THREADS or all cores)");
  generate->add_option("--out", gen.out, "output .qds path")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train the denoiser and write the best checkpoint");
  train->add_option("--config", tr.config, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  train->add_option("--data", tr.data, "input .qds dataset")->required()->check(CLI::ExistingFile);
  train->add_option("--out", tr.out, "output checkpoint path")->required();
  train->add_option("--log", tr.log, "JSONL epoch log (default: <out>.log.jsonl)");
  train->add_option("--epochs", tr.epochs, "training epochs");
  train->add_option("--batch-size", tr.batch_size, "mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--lr", tr.lr, "initial learning rate");
  train->add_option("--lambda", tr.lambda, "weight of the fidelity term");
  train->add_option("--dropout", tr.dropout, "dropout rate");
  train->add_option("--filters", tr.filters, "comma list of encoder widths")->delimiter(',');
  train->add_option("--seed", tr.seed, "shuffle and initialization seed");
  train->add_option("--test-fraction", tr.test_fraction, "held-out test fraction");
  train->add_option("--split-seed", tr.split_seed, "train/test split seed");
  train->add_flag("--quiet", tr.quiet, "do not print per-epoch lines");

  EvalArgs ev;
  auto* evaluate = app.add_subcommand("eval", "evaluate a checkpoint on its held-out split and write reports");
  evaluate->add_option("--data", ev.data, "input .qds dataset")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", ev.model, "checkpoint written by train")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "report directory")->required();

  std::string inspect_data;
  bool inspect_json = false;
  auto* inspect = app.add_subcommand("inspect", "print the manifest and per-cell noisy fidelity statistics");
  inspect->add_option("--data", inspect_data, "input .qds dataset")->required()->check(CLI::ExistingFile);
  inspect->add_flag("--json", inspect_json, "print machine-readable JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen, *generate);
    if (*train) return run_train(tr, *train);
    if (*evaluate) return run_eval(ev);
    if (*inspect) return run_inspect(inspect_data, inspect_json);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
