// include/orgate/trainer.hpp

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

#ifndef ORGATE_TRAINER_HPP_
#define ORGATE_TRAINER_HPP_

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orgate/dataset.hpp"
#include "orgate/model.hpp"
#include "orgate/selector.hpp"

namespace orgate {

enum class Mode {
  kBaseline,       // every epoch trains on all samples
  kOrGate,         // w early epochs, then OR-gate selection with top-k
  kOrGateNoEarly,  // OR-gate from epoch 0 (w forced to 0)
  kOrGateK1,       // OR-gate with k forced to 1
  kSelfBaseline,   // w early epochs, then moving-average argmax selection
};

const char* ModeName(Mode mode);
Mode ParseMode(const std::string& name);
const std::vector<Mode>& AllModes();

struct TrainConfig {
  Mode mode = Mode::kOrGate;
  int early_epochs = 5;  // w
  int top_k = 0;         // 0 picks DefaultTopK(num_classes)
  int max_epochs = 30;
  int batch_size = 64;
  OptimizerConfig optimizer;
  ModelConfig model;
  uint64_t seed = 1;     // batch shuffling
  double self_alpha = 0.9;
  int eval_interval = 5;
  bool retain_history = false;

  bool operator==(const TrainConfig&) const = default;
};

/// Roughly 7% of the classes, at least one.
int DefaultTopK(int num_classes);

/// Applies the mode overrides (no_early: w = 0, k1: k = 1), fills in the
/// default k and the model's input/output sizes, and validates. Throws
/// kConfig on any inconsistency.
TrainConfig ResolveTrainConfig(TrainConfig config, int num_classes,
                               int feature_dim);

struct EpochLog {
  int epoch = 0;
  double learning_rate = 0.0;
  std::optional<double> mean_training_loss;  // absent when nothing trained
  int num_selected = 0;
  int num_rejected = 0;
  std::optional<double> selection_precision;
  std::optional<double> selection_recall;
  std::optional<double> eer;

  bool operator==(const EpochLog&) const = default;
};

/// Corpus features laid out as a column-per-sample matrix.
struct TrainingData {
  explicit TrainingData(const NoisyCorpus& corpus);

  const NoisyCorpus* corpus;
  Eigen::MatrixXd features;
  std::vector<int> observed_labels;

  int size() const { return static_cast<int>(observed_labels.size()); }
};

/**
   One pass over a seeded shuffle of all samples. Columns gated kClean get
   forward and backward with their observed label; kNoisy columns are only
   forwarded. Every sample's margin-softmax output from that forward pass
   (taken before the batch's own update) is recorded into `store` and, if
   given, folded into `moving_average`.
*/
EpochLog TrainEpochWithDecisions(Model& model, const TrainingData& data,
                                 std::span<const Decision> gate,
                                 PredictionStore& store, int epoch, double lr,
                                 const TrainConfig& config,
                                 SelfMovingAverage* moving_average = nullptr);

/// Early-learning epoch: every sample is trained.
EpochLog TrainEpochAll(Model& model, const TrainingData& data,
                       PredictionStore& store, int epoch, double lr,
                       const TrainConfig& config,
                       SelfMovingAverage* moving_average = nullptr);

/// OR-gate decisions for every sample against records of epochs < epoch.
std::vector<Decision> OrGateDecisions(const PredictionStore& store,
                                      const TrainingData& data, int epoch);

/// Self-confident epoch: the gate is frozen from the store at epoch start.
EpochLog TrainEpochGated(Model& model, const TrainingData& data,
                         PredictionStore& store, int epoch, double lr,
                         const TrainConfig& config,
                         SelfMovingAverage* moving_average = nullptr);

struct EvalSet {
  const NoisyCorpus* test_corpus = nullptr;
  const TrialList* trials = nullptr;
};

struct RunResult {
  TrainConfig config;  // resolved
  std::vector<EpochLog> epochs;
  Model model;
  std::optional<double> final_eer;
  double duration_seconds = 0.0;
};

RunResult RunExperiment(const TrainConfig& config, const NoisyCorpus& corpus,
                        const EvalSet& eval);

/// Writes config.json, epochs.csv, model.ckpt and result.json into `dir`
/// (created if missing).
void WriteRunDirectory(const RunResult& result, const std::string& dir);

std::string EpochTableCsv(std::span<const EpochLog> epochs);

}  // namespace orgate

#endif  // ORGATE_TRAINER_HPP_
