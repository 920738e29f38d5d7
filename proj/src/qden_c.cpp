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

#include "qden/qden.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "qden/config.hpp"
#include "qden/dataset.hpp"
#include "qden/error.hpp"
#include "qden/eval.hpp"
#include "qden/metrics.hpp"
#include "qden/model.hpp"
#include "qden/train.hpp"

struct qden_dataset {
  qden::Dataset data;
};

struct qden_model {
  qden::nn::Checkpoint checkpoint;
};

namespace {

using nlohmann::ordered_json;

thread_local std::string g_last_error;

qden_status fail(qden_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
qden_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return QDEN_OK;
  } catch (const qden::Error& e) {
    return fail(static_cast<qden_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(QDEN_INVALID_ARGUMENT, std::string("json: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(QDEN_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QDEN_INTERNAL, e.what());
  } catch (...) {
    return fail(QDEN_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw qden::InvalidArgument(std::string(what) + " is NULL");
}

qden::RunConfig resolve(const char* config_json) {
  qden::RunConfig cfg;
  if (config_json && *config_json) qden::apply_json(cfg, config_json);
  return cfg;
}

void put_matrix(const qden::CMat& m, double* out) {
  for (const auto& v : m.data()) {
    *out++ = v.real();
    *out++ = v.imag();
  }
}

std::vector<std::size_t> test_indices(const qden_model& model, const qden::Dataset& ds) {
  const auto meta = nlohmann::json::parse(model.checkpoint.metadata_json);
  if (!meta.contains("split") || !meta.contains("num_qubits")) {
    throw qden::ConfigMismatch("model metadata carries no train/test split; it was not produced by qden_train");
  }
  const auto qubits = meta.at("num_qubits").get<std::uint32_t>();
  if (qubits != ds.manifest.num_qubits) {
    throw qden::ConfigMismatch("model was trained on " + std::to_string(qubits) + "-qubit data, dataset has " +
                               std::to_string(ds.manifest.num_qubits) + " qubits");
  }
  if (meta.contains("num_samples") && meta.at("num_samples").get<std::uint64_t>() != ds.samples.size()) {
    throw qden::ConfigMismatch("model was trained on a dataset with a different sample count");
  }
  const auto& split = meta.at("split");
  return qden::split_train_test(ds, split.at("test_fraction").get<double>(), split.at("split_seed").get<std::uint64_t>())
      .test;
}

}  // namespace

extern "C" {

const char* qden_version(void) { return "0.1.0"; }

const char* qden_last_error(void) { return g_last_error.c_str(); }

void qden_string_free(char* s) { std::free(s); }

qden_status qden_config_resolve(const char* const* layers, size_t num_layers, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    if (num_layers) require(layers, "layers");
    qden::RunConfig cfg;
    for (size_t i = 0; i < num_layers; ++i)
      if (layers[i]) qden::apply_json(cfg, layers[i]);
    qden::validate(cfg);
    *out_json = dup_string(qden::to_json(cfg));
  });
}

qden_status qden_dataset_generate(const char* config_json, qden_dataset** out) {
  return guarded([&] {
    require(out, "out");
    const auto cfg = resolve(config_json);
    qden::validate(cfg);
    auto ds = std::make_unique<qden_dataset>();
    ds->data = qden::generate_dataset(cfg.dataset);
    *out = ds.release();
  });
}

qden_status qden_dataset_read(const char* path, qden_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto ds = std::make_unique<qden_dataset>();
    ds->data = qden::read_qds(path);
    *out = ds.release();
  });
}

qden_status qden_dataset_write(const qden_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, "dataset");
    require(path, "path");
    qden::write_qds(ds->data, path);
  });
}

void qden_dataset_free(qden_dataset* ds) { delete ds; }

qden_status qden_dataset_info(const qden_dataset* ds, uint32_t* num_qubits, uint64_t* num_samples) {
  return guarded([&] {
    require(ds, "dataset");
    if (num_qubits) *num_qubits = ds->data.manifest.num_qubits;
    if (num_samples) *num_samples = ds->data.samples.size();
  });
}

qden_status qden_dataset_manifest_json(const qden_dataset* ds, char** out_json) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_json, "out_json");
    *out_json = dup_string(qden::manifest_to_json(ds->data.manifest));
  });
}

qden_status qden_dataset_statistics_json(const qden_dataset* ds, char** out_json) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_json, "out_json");
    *out_json = dup_string(qden::eval::to_json(qden::eval::dataset_statistics(ds->data)));
  });
}

qden_status qden_dataset_validate(const qden_dataset* ds) {
  return guarded([&] {
    require(ds, "dataset");
    qden::validate_dataset(ds->data);
  });
}

qden_status qden_dataset_sample(const qden_dataset* ds, uint64_t index, uint8_t* kind, double* level, uint64_t* seed,
                                double* clean, double* noisy) {
  return guarded([&] {
    require(ds, "dataset");
    if (index >= ds->data.samples.size()) {
      throw qden::InvalidArgument("sample index " + std::to_string(index) + " out of range");
    }
    const auto& rec = ds->data.samples[index];
    if (kind) *kind = static_cast<uint8_t>(rec.noise_kind);
    if (level) *level = rec.noise_level;
    if (seed) *seed = rec.sample_seed;
    if (clean) put_matrix(rec.clean.mat, clean);
    if (noisy) put_matrix(rec.noisy.mat, noisy);
  });
}

qden_status qden_train(const qden_dataset* ds, const char* config_json, qden_epoch_callback on_epoch, void* user,
                       qden_model** out_model, char** out_summary_json) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_model, "out_model");
    auto cfg = resolve(config_json);
    const auto& data = ds->data;
    const std::uint32_t dim = data.manifest.dim;
    if (cfg.model.dim == 0) cfg.model.dim = dim;
    if (cfg.model.dim != dim) {
      throw qden::ConfigMismatch("model.dim " + std::to_string(cfg.model.dim) + " does not match dataset dim " +
                                 std::to_string(dim));
    }
    cfg.dataset.num_qubits = data.manifest.num_qubits;
    cfg.dataset.num_samples = data.manifest.num_samples;
    qden::validate(cfg);

    const auto split = qden::split_train_test(data, cfg.split.test_fraction, cfg.split.split_seed);
    const auto initial = qden::nn::init_params(cfg.model, cfg.init_seed);
    const auto before = qden::train::evaluate_loss(initial, cfg.model, data, split.test);

    qden::train::EpochCallback cb;
    if (on_epoch) cb = [&](const qden::train::EpochLog& log) { on_epoch(qden::train::to_json_line(log).c_str(), user); };
    auto result = qden::train::train(initial, cfg.model, data, split.train, cfg.train, cb);
    const auto after = qden::train::evaluate_loss(result.best_params, cfg.model, data, split.test);

    const auto resolved = ordered_json::parse(qden::to_json(cfg));
    ordered_json meta;
    meta["num_qubits"] = data.manifest.num_qubits;
    meta["num_samples"] = data.samples.size();
    meta["dataset_seed"] = data.manifest.global_seed;
    meta["split"] = resolved.at("split");
    meta["train"] = resolved.at("train");
    meta["epochs_run"] = result.logs.size();
    meta["best_epoch"] = result.best_epoch;
    if (std::isfinite(result.best_val_loss)) meta["best_val_loss"] = result.best_val_loss;
    else meta["best_val_loss"] = nullptr;
    meta["early_stopped"] = result.early_stopped;

    auto model = std::make_unique<qden_model>();
    model->checkpoint.config = cfg.model;
    model->checkpoint.params = std::move(result.best_params);
    model->checkpoint.metadata_json = meta.dump();

    if (out_summary_json) {
      ordered_json summary = meta;
      summary["train_samples"] = result.fit_indices.size();
      summary["validation_samples"] = result.val_indices.size();
      summary["test_samples"] = split.test.size();
      summary["test_loss_untrained"] = before.loss;
      summary["test_mae_untrained"] = before.mae;
      summary["test_loss"] = after.loss;
      summary["test_mae"] = after.mae;
      summary["lr_final"] = result.logs.empty() ? cfg.train.initial_lr : result.logs.back().lr;
      *out_summary_json = dup_string(summary.dump(2) + "\n");
    }
    *out_model = model.release();
  });
}

qden_status qden_model_save(const qden_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    qden::nn::save_checkpoint(model->checkpoint, path);
  });
}

qden_status qden_model_load(const char* path, const char* expected_model_json, qden_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::optional<qden::nn::ModelConfig> expected;
    if (expected_model_json) expected = qden::nn::model_config_from_json(expected_model_json);
    auto model = std::make_unique<qden_model>();
    model->checkpoint = qden::nn::load_checkpoint(path, expected);
    *out = model.release();
  });
}

void qden_model_free(qden_model* model) { delete model; }

qden_status qden_model_config_json(const qden_model* model, char** out_json) {
  return guarded([&] {
    require(model, "model");
    require(out_json, "out_json");
    *out_json = dup_string(qden::nn::to_json(model->checkpoint.config));
  });
}

qden_status qden_model_metadata_json(const qden_model* model, char** out_json) {
  return guarded([&] {
    require(model, "model");
    require(out_json, "out_json");
    *out_json = dup_string(model->checkpoint.metadata_json);
  });
}

qden_status qden_model_denoise(const qden_model* model, const double* noisy, size_t dim, double* out) {
  return guarded([&] {
    require(model, "model");
    require(noisy, "noisy");
    require(out, "out");
    const auto& ckpt = model->checkpoint;
    if (dim != ckpt.config.dim) {
      throw qden::ConfigMismatch("input dim " + std::to_string(dim) + " != model dim " +
                                 std::to_string(ckpt.config.dim));
    }
    const qden::Tensor x({1, dim, dim, 2}, std::vector<double>(noisy, noisy + 2 * dim * dim));
    const auto trace = qden::nn::model_forward(ckpt.params, ckpt.config, x, false);
    put_matrix(qden::project_to_dm(qden::batch_item_to_matrix(trace.output, 0)).mat, out);
  });
}

qden_status qden_evaluate(const qden_model* model, const qden_dataset* ds, const char* out_dir,
                          char** out_summary_json) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(out_dir, "out_dir");
    const auto& ckpt = model->checkpoint;
    if (ckpt.config.dim != ds->data.manifest.dim) {
      throw qden::ConfigMismatch("model dim " + std::to_string(ckpt.config.dim) + " != dataset dim " +
                                 std::to_string(ds->data.manifest.dim));
    }
    const auto test = test_indices(*model, ds->data);
    const auto corrector = qden::eval::model_corrector(ckpt.params, ckpt.config);
    const auto summary = qden::eval::evaluate_corrections(ds->data, test, corrector);
    const std::filesystem::path dir(out_dir);
    qden::eval::export_reports(summary, dir);
    if (!summary.samples.empty()) {
      const auto& rec = ds->data.samples[summary.samples.front().index];
      qden::eval::export_heatmaps(rec, qden::project_to_dm(corrector(rec)), dir / "heatmaps");
    }
    if (out_summary_json) *out_summary_json = dup_string(qden::eval::to_json(summary));
  });
}

}  // extern "C"
