// src/c_api.cpp

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

#include "orgate/orgate.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <stdexcept>
#include <string>

#include "orgate/config_io.hpp"
#include "orgate/error.hpp"
#include "orgate/eval.hpp"
#include "orgate/plan.hpp"
#include "orgate/trainer.hpp"
#include "orgate/util.hpp"

struct orgate_corpus {
  orgate::NoisyCorpus corpus;
};

struct orgate_trials {
  orgate::TrialList trials;
};

struct orgate_run {
  orgate::RunResult result;
};

namespace {

thread_local std::string last_error;

// Thrown for NULL or malformed arguments at the API boundary.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void Require(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}

orgate_status SetError(orgate_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
orgate_status Guard(F&& body) {
  try {
    body();
    return ORGATE_OK;
  } catch (const orgate::Error& e) {
    return SetError(static_cast<orgate_status>(e.kind()), e.what());
  } catch (const ArgumentError& e) {
    return SetError(ORGATE_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return SetError(ORGATE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(ORGATE_ERR_INTERNAL, e.what());
  } catch (...) {
    return SetError(ORGATE_ERR_INTERNAL, "unknown exception");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json ParseConfig(const char* text) {
  if (text == nullptr || *text == '\0') return nlohmann::json::object();
  return orgate::ParseJsonText(text);
}

orgate::ExperimentPlan PlanFromJson(const char* text) {
  orgate::ExperimentPlan plan;
  orgate::MergeJson(ParseConfig(text), &plan);
  return plan;
}

}  // namespace

extern "C" {

const char* orgate_version(void) { return "0.1.0"; }

const char* orgate_last_error(void) { return last_error.c_str(); }

const char* orgate_status_name(orgate_status status) {
  switch (status) {
    case ORGATE_OK: return "ok";
    case ORGATE_ERR_ARGUMENT: return "argument error";
    case ORGATE_ERR_INTERNAL: return "internal error";
    default:
      if (status >= ORGATE_ERR_CONFIG && status <= ORGATE_ERR_IO)
        return orgate::ErrorKindName(static_cast<orgate::ErrorKind>(status));
      return "unknown status";
  }
}

void orgate_string_free(char* str) { std::free(str); }

void orgate_set_warnings(int enabled) { orgate::SetWarningsEnabled(enabled != 0); }

// ---- corpora ----

orgate_status orgate_corpus_generate(const char* config_json, orgate_corpus** out) {
  return Guard([&] {
    Require(out != nullptr, "out is NULL");
    orgate::CorpusConfig config;
    orgate::MergeJson(ParseConfig(config_json), &config);
    *out = new orgate_corpus{orgate::GenerateCorpus(config)};
  });
}

orgate_status orgate_corpus_inject_noise(const orgate_corpus* corpus, double noise_rate,
                                         uint64_t seed, const char* mode,
                                         orgate_corpus** out) {
  return Guard([&] {
    Require(corpus != nullptr && out != nullptr, "corpus or out is NULL");
    const orgate::NoiseMode noise_mode =
        mode == nullptr ? orgate::NoiseMode::kBernoulli : orgate::ParseNoiseMode(mode);
    *out = new orgate_corpus{
        orgate::InjectSymmetricNoise(corpus->corpus, noise_rate, seed, noise_mode)};
  });
}

orgate_status orgate_corpus_load(const char* path, orgate_corpus** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "path or out is NULL");
    *out = new orgate_corpus{orgate::LoadCorpus(path)};
  });
}

orgate_status orgate_corpus_save(const orgate_corpus* corpus, const char* path) {
  return Guard([&] {
    Require(corpus != nullptr && path != nullptr, "corpus or path is NULL");
    orgate::SaveCorpus(corpus->corpus, path);
  });
}

int orgate_corpus_num_samples(const orgate_corpus* corpus) {
  return corpus ? static_cast<int>(corpus->corpus.samples.size()) : 0;
}

int orgate_corpus_num_classes(const orgate_corpus* corpus) {
  return corpus ? corpus->corpus.num_classes() : 0;
}

int orgate_corpus_feature_dim(const orgate_corpus* corpus) {
  return corpus ? corpus->corpus.config.feature_dim : 0;
}

int orgate_corpus_num_corrupted(const orgate_corpus* corpus) {
  return corpus ? corpus->corpus.NumCorrupted() : 0;
}

void orgate_corpus_free(orgate_corpus* corpus) { delete corpus; }

// ---- trial lists ----

orgate_status orgate_trials_make(const orgate_corpus* test_corpus, int num_target,
                                 int num_nontarget, uint64_t seed, orgate_trials** out) {
  return Guard([&] {
    Require(test_corpus != nullptr && out != nullptr, "test_corpus or out is NULL");
    *out = new orgate_trials{
        orgate::MakeTrials(test_corpus->corpus, num_target, num_nontarget, seed)};
  });
}

orgate_status orgate_trials_load(const char* path, const orgate_corpus* test_corpus,
                                 orgate_trials** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "path or out is NULL");
    const int n = test_corpus ? static_cast<int>(test_corpus->corpus.samples.size()) : -1;
    *out = new orgate_trials{orgate::LoadTrials(path, n)};
  });
}

orgate_status orgate_trials_save(const orgate_trials* trials, const char* path) {
  return Guard([&] {
    Require(trials != nullptr && path != nullptr, "trials or path is NULL");
    orgate::SaveTrials(trials->trials, path);
  });
}

int orgate_trials_size(const orgate_trials* trials) {
  return trials ? static_cast<int>(trials->trials.trials.size()) : 0;
}

void orgate_trials_free(orgate_trials* trials) { delete trials; }

// ---- single runs ----

orgate_status orgate_train(const char* train_config_json, const orgate_corpus* train,
                           const orgate_corpus* test_corpus, const orgate_trials* trials,
                           orgate_run** out) {
  return Guard([&] {
    Require(train != nullptr && out != nullptr, "train or out is NULL");
    Require((test_corpus == nullptr) == (trials == nullptr),
            "test_corpus and trials must both be set or both be NULL");
    orgate::TrainConfig config;
    orgate::MergeJson(ParseConfig(train_config_json), &config);
    orgate::EvalSet eval;
    if (test_corpus != nullptr) eval = {&test_corpus->corpus, &trials->trials};
    *out = new orgate_run{orgate::RunExperiment(config, train->corpus, eval)};
  });
}

int orgate_run_num_epochs(const orgate_run* run) {
  return run ? static_cast<int>(run->result.epochs.size()) : 0;
}

orgate_status orgate_run_epoch(const orgate_run* run, int epoch, orgate_epoch_log* out) {
  return Guard([&] {
    Require(run != nullptr && out != nullptr, "run or out is NULL");
    if (epoch < 0 || epoch >= static_cast<int>(run->result.epochs.size()))
      orgate::Fail(orgate::ErrorKind::kLookup, "epoch " + std::to_string(epoch) +
                                                   " out of range");
    const orgate::EpochLog& e = run->result.epochs[epoch];
    *out = orgate_epoch_log{};
    out->epoch = e.epoch;
    out->learning_rate = e.learning_rate;
    out->has_mean_training_loss = e.mean_training_loss.has_value();
    out->mean_training_loss = e.mean_training_loss.value_or(0.0);
    out->num_selected = e.num_selected;
    out->num_rejected = e.num_rejected;
    out->has_precision = e.selection_precision.has_value();
    out->precision = e.selection_precision.value_or(0.0);
    out->has_recall = e.selection_recall.has_value();
    out->recall = e.selection_recall.value_or(0.0);
    out->has_eer = e.eer.has_value();
    out->eer = e.eer.value_or(0.0);
  });
}

orgate_status orgate_run_final_eer(const orgate_run* run, double* eer) {
  return Guard([&] {
    Require(run != nullptr && eer != nullptr, "run or eer is NULL");
    if (!run->result.final_eer)
      orgate::Fail(orgate::ErrorKind::kState, "run was not evaluated");
    *eer = *run->result.final_eer;
  });
}

orgate_status orgate_run_write(const orgate_run* run, const char* dir) {
  return Guard([&] {
    Require(run != nullptr && dir != nullptr, "run or dir is NULL");
    orgate::WriteRunDirectory(run->result, dir);
  });
}

void orgate_run_free(orgate_run* run) { delete run; }

// ---- plans and tables ----

orgate_status orgate_plan_resolve(const char* overrides_json, char** plan_json) {
  return Guard([&] {
    Require(plan_json != nullptr, "plan_json is NULL");
    const orgate::ExperimentPlan plan = PlanFromJson(overrides_json);
    *plan_json = CopyString(orgate::ToJson(plan).dump(2) + "\n");
  });
}

orgate_status orgate_plan_run(const char* plan_json, int verbose, char** results_json) {
  return Guard([&] {
    const orgate::ExperimentPlan plan = PlanFromJson(plan_json);
    const orgate::ResultsTable table =
        orgate::RunPlan(plan, verbose ? &std::cerr : nullptr);
    if (results_json != nullptr) *results_json = CopyString(orgate::ResultsJson(table));
  });
}

orgate_status orgate_report(const char* results_path, const char* output_dir) {
  return Guard([&] {
    Require(results_path != nullptr && output_dir != nullptr,
            "results_path or output_dir is NULL");
    orgate::Report(results_path, output_dir);
  });
}

// ---- metrics ----

orgate_status orgate_compute_eer(const double* scores, const int* is_target, size_t n,
                                 double* eer, double* threshold) {
  return Guard([&] {
    Require(eer != nullptr, "eer is NULL");
    Require(n == 0 || (scores != nullptr && is_target != nullptr),
            "scores or is_target is NULL");
    orgate::ScoredTrials scored(n);
    for (size_t i = 0; i < n; ++i) scored[i] = {scores[i], is_target[i] != 0};
    const orgate::EerResult r = orgate::ComputeEer(scored);
    *eer = r.eer;
    if (threshold != nullptr) *threshold = r.threshold;
  });
}

}  // extern "C"
