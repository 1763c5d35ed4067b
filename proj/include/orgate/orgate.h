// include/orgate/orgate.h

// Copyright 2026 The orgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

/*
   C interface to the orgate library.

   Every function that can fail returns an orgate_status; on failure a
   description is available from orgate_last_error() on the same thread
   until the next failing call. Objects are opaque and owned by the caller,
   who releases them with the matching *_free function (NULL is accepted).
   Strings returned through char** are released with orgate_string_free.

   Configuration is exchanged as JSON text using the same keys as the
   config.json / plan.json files written by the library. Missing keys keep
   their defaults; unknown keys are rejected with ORGATE_ERR_CONFIG.
*/

#ifndef ORGATE_ORGATE_H_
#define ORGATE_ORGATE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ORGATE_BUILDING_LIBRARY)
#define ORGATE_API __attribute__((visibility("default")))
#else
#define ORGATE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  ORGATE_OK = 0,
  ORGATE_ERR_CONFIG = 1,
  ORGATE_ERR_STATE = 2,
  ORGATE_ERR_PARSE = 3,
  ORGATE_ERR_FORMAT = 4,
  ORGATE_ERR_NUMERIC = 5,
  ORGATE_ERR_SHAPE = 6,
  ORGATE_ERR_LOOKUP = 7,
  ORGATE_ERR_INPUT = 8,
  ORGATE_ERR_IO = 9,
  ORGATE_ERR_ARGUMENT = 10, /* NULL pointer or invalid enum argument */
  ORGATE_ERR_INTERNAL = 11
} orgate_status;

typedef struct orgate_corpus orgate_corpus;
typedef struct orgate_trials orgate_trials;
typedef struct orgate_run orgate_run;

typedef struct {
  int epoch;
  double learning_rate;
  int has_mean_training_loss;
  double mean_training_loss;
  int num_selected;
  int num_rejected;
  int has_precision;
  double precision;
  int has_recall;
  double recall;
  int has_eer;
  double eer;
} orgate_epoch_log;

ORGATE_API const char* orgate_version(void);
ORGATE_API const char* orgate_last_error(void);
ORGATE_API const char* orgate_status_name(orgate_status status);
ORGATE_API void orgate_string_free(char* str);
/* Enables or disables warnings on stderr (enabled by default). */
ORGATE_API void orgate_set_warnings(int enabled);

/* ---- corpora ---- */

/* config_json: corpus keys (num_speakers, feature_dim, ...); NULL or ""
   means all defaults. */
ORGATE_API orgate_status orgate_corpus_generate(const char* config_json, orgate_corpus** out);
/* mode: "bernoulli" or "exact". */
ORGATE_API orgate_status orgate_corpus_inject_noise(const orgate_corpus* corpus, double noise_rate,
                                                    uint64_t seed, const char* mode,
                                                    orgate_corpus** out);
ORGATE_API orgate_status orgate_corpus_load(const char* path, orgate_corpus** out);
ORGATE_API orgate_status orgate_corpus_save(const orgate_corpus* corpus, const char* path);
ORGATE_API int orgate_corpus_num_samples(const orgate_corpus* corpus);
ORGATE_API int orgate_corpus_num_classes(const orgate_corpus* corpus);
ORGATE_API int orgate_corpus_feature_dim(const orgate_corpus* corpus);
ORGATE_API int orgate_corpus_num_corrupted(const orgate_corpus* corpus);
ORGATE_API void orgate_corpus_free(orgate_corpus* corpus);

/* ---- trial lists ---- */

ORGATE_API orgate_status orgate_trials_make(const orgate_corpus* test_corpus, int num_target,
                                            int num_nontarget, uint64_t seed, orgate_trials** out);
/* Ids are checked against test_corpus when it is not NULL. */
ORGATE_API orgate_status orgate_trials_load(const char* path, const orgate_corpus* test_corpus,
                                            orgate_trials** out);
ORGATE_API orgate_status orgate_trials_save(const orgate_trials* trials, const char* path);
ORGATE_API int orgate_trials_size(const orgate_trials* trials);
ORGATE_API void orgate_trials_free(orgate_trials* trials);

/* ---- single runs ---- */

/* train_config_json: training keys (mode, early_epochs, top_k, optimizer,
   model, ...). test_corpus and trials are both NULL (no evaluation) or
   both set. */
ORGATE_API orgate_status orgate_train(const char* train_config_json, const orgate_corpus* train,
                                      const orgate_corpus* test_corpus, const orgate_trials* trials,
                                      orgate_run** out);
ORGATE_API int orgate_run_num_epochs(const orgate_run* run);
ORGATE_API orgate_status orgate_run_epoch(const orgate_run* run, int epoch, orgate_epoch_log* out);
/* Returns ORGATE_ERR_STATE when the run was not evaluated. */
ORGATE_API orgate_status orgate_run_final_eer(const orgate_run* run, double* eer);
/* Writes config.json, epochs.csv, model.ckpt and result.json. */
ORGATE_API orgate_status orgate_run_write(const orgate_run* run, const char* dir);
ORGATE_API void orgate_run_free(orgate_run* run);

/* ---- plans and tables ---- */

/* The default plan, merged with overrides_json (may be NULL), as JSON. */
ORGATE_API orgate_status orgate_plan_resolve(const char* overrides_json, char** plan_json);
/* Runs a plan given as JSON (merged over the default plan). Progress lines
   go to stderr when verbose is nonzero. results_json receives the results
   table in the results.json format and may be NULL. */
ORGATE_API orgate_status orgate_plan_run(const char* plan_json, int verbose, char** results_json);
/* Reads results_path (a results.json) and re-emits all tables in output_dir. */
ORGATE_API orgate_status orgate_report(const char* results_path, const char* output_dir);

/* ---- metrics ---- */

ORGATE_API orgate_status orgate_compute_eer(const double* scores, const int* is_target, size_t n,
                                            double* eer, double* threshold);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* ORGATE_ORGATE_H_ */
