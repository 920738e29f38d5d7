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

/* C interface to the qden library.
 *
 * All functions return a qden_status. On failure a message is available from
 * qden_last_error() on the calling thread until the next call. Strings handed
 * out through char** parameters are owned by the caller and released with
 * qden_string_free(). Configuration is passed as JSON text using the same
 * layout as the config file accepted by the command-line tool.
 */
#ifndef QDEN_QDEN_H_
#define QDEN_QDEN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(QDEN_BUILDING_LIBRARY)
#define QDEN_API __declspec(dllexport)
#else
#define QDEN_API __declspec(dllimport)
#endif
#else
#define QDEN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qden_status {
  QDEN_OK = 0,
  QDEN_INVALID_ARGUMENT = 1,
  QDEN_IO = 2,
  QDEN_FORMAT = 3,
  QDEN_NUMERIC = 4,
  QDEN_CONFIG_MISMATCH = 5,
  QDEN_INTERNAL = 99
} qden_status;

typedef struct qden_dataset qden_dataset;
typedef struct qden_model qden_model;

/* Receives one JSON object per finished epoch. */
typedef void (*qden_epoch_callback)(const char* epoch_json, void* user);

QDEN_API const char* qden_version(void);
QDEN_API const char* qden_last_error(void);
QDEN_API void qden_string_free(char* s);

/* Applies each JSON layer over the defaults, validates, and returns the
 * resolved configuration. */
QDEN_API qden_status qden_config_resolve(const char* const* layers, size_t num_layers, char** out_json);

/* Datasets. */
QDEN_API qden_status qden_dataset_generate(const char* config_json, qden_dataset** out);
QDEN_API qden_status qden_dataset_read(const char* path, qden_dataset** out);
QDEN_API qden_status qden_dataset_write(const qden_dataset* ds, const char* path);
QDEN_API void qden_dataset_free(qden_dataset* ds);
QDEN_API qden_status qden_dataset_info(const qden_dataset* ds, uint32_t* num_qubits, uint64_t* num_samples);
QDEN_API qden_status qden_dataset_manifest_json(const qden_dataset* ds, char** out_json);
QDEN_API qden_status qden_dataset_statistics_json(const qden_dataset* ds, char** out_json);
QDEN_API qden_status qden_dataset_validate(const qden_dataset* ds);
/* Copies one record. clean and noisy receive dim*dim interleaved (re, im)
 * pairs, i.e. 2*dim*dim doubles each; any output may be NULL. */
QDEN_API qden_status qden_dataset_sample(const qden_dataset* ds, uint64_t index, uint8_t* kind, double* level,
                                         uint64_t* seed, double* clean, double* noisy);

/* Training. Splits the dataset with the configured test fraction and seed,
 * trains on the training part, and returns the best-validation model. The
 * summary (may be NULL) describes the run. */
QDEN_API qden_status qden_train(const qden_dataset* ds, const char* config_json, qden_epoch_callback on_epoch,
                                void* user, qden_model** out_model, char** out_summary_json);

/* Models. expected_model_json may be NULL; otherwise loading fails with
 * QDEN_CONFIG_MISMATCH unless the stored architecture matches it. */
QDEN_API qden_status qden_model_save(const qden_model* model, const char* path);
QDEN_API qden_status qden_model_load(const char* path, const char* expected_model_json, qden_model** out);
QDEN_API void qden_model_free(qden_model* model);
QDEN_API qden_status qden_model_config_json(const qden_model* model, char** out_json);
QDEN_API qden_status qden_model_metadata_json(const qden_model* model, char** out_json);
/* Runs the network on one noisy state (2*dim*dim interleaved doubles) and
 * writes the projected density matrix in the same layout. */
QDEN_API qden_status qden_model_denoise(const qden_model* model, const double* noisy, size_t dim, double* out);

/* Evaluates on the held-out split recorded in the model and writes the CSV
 * and JSON reports plus heatmaps of one test sample into out_dir. */
QDEN_API qden_status qden_evaluate(const qden_model* model, const qden_dataset* ds, const char* out_dir,
                                   char** out_summary_json);

#ifdef __cplusplus
}
#endif

#endif  // QDEN_QDEN_H_
