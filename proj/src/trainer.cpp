// src/trainer.cpp

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

#include "orgate/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "orgate/config_io.hpp"
#include "orgate/error.hpp"
#include "orgate/eval.hpp"
#include "orgate/util.hpp"

namespace orgate {

namespace {

// Tag space for DeriveSeed; epoch shuffles use kShuffleTag + epoch.
constexpr uint64_t kShuffleTag = 1u << 20;

std::string OptionalCell(const std::optional<double>& v) {
  return v ? FormatMetric(*v) : std::string();
}

nlohmann::ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

const char* ModeName(Mode mode) {
  switch (mode) {
    case Mode::kBaseline: return "baseline";
    case Mode::kOrGate: return "orgate";
    case Mode::kOrGateNoEarly: return "orgate_no_early";
    case Mode::kOrGateK1: return "orgate_k1";
    case Mode::kSelfBaseline: return "self_baseline";
  }
  return "?";
}

Mode ParseMode(const std::string& name) {
  for (Mode m : AllModes())
    if (name == ModeName(m)) return m;
  Fail(ErrorKind::kConfig, "unknown mode '" + name + "'");
}

const std::vector<Mode>& AllModes() {
  static const std::vector<Mode> modes = {Mode::kBaseline, Mode::kOrGate,
                                          Mode::kOrGateNoEarly, Mode::kOrGateK1,
                                          Mode::kSelfBaseline};
  return modes;
}

int DefaultTopK(int num_classes) {
  return std::max(1, static_cast<int>(std::lround(0.07 * num_classes)));
}

TrainConfig ResolveTrainConfig(TrainConfig config, int num_classes,
                               int feature_dim) {
  config.model.num_classes = num_classes;
  config.model.feature_dim = feature_dim;
  if (config.mode == Mode::kOrGateNoEarly) config.early_epochs = 0;
  if (config.top_k == 0) config.top_k = DefaultTopK(num_classes);
  if (config.mode == Mode::kOrGateK1) config.top_k = 1;

  if (config.max_epochs < 1) Fail(ErrorKind::kConfig, "max_epochs must be >= 1");
  if (config.early_epochs < 0)
    Fail(ErrorKind::kConfig, "early_epochs must be >= 0");
  if (config.early_epochs >= config.max_epochs)
    Fail(ErrorKind::kConfig, "early_epochs must be < max_epochs");
  if (config.top_k < 1 || config.top_k > num_classes)
    Fail(ErrorKind::kConfig, "top_k must lie in [1, num_classes]");
  if (config.batch_size < 1) Fail(ErrorKind::kConfig, "batch_size must be >= 1");
  if (config.eval_interval < 1)
    Fail(ErrorKind::kConfig, "eval_interval must be >= 1");
  if (!(config.self_alpha >= 0.0 && config.self_alpha <= 1.0))
    Fail(ErrorKind::kConfig, "self_alpha must lie in [0, 1]");
  if (config.mode == Mode::kSelfBaseline && config.early_epochs < 1)
    Fail(ErrorKind::kConfig,
         "self_baseline needs at least one early epoch to seed its averages");
  config.optimizer.Validate();
  config.model.Validate();
  return config;
}

TrainingData::TrainingData(const NoisyCorpus& corpus)
    : corpus(&corpus),
      features(corpus.config.feature_dim, corpus.size()) {
  observed_labels.reserve(corpus.size());
  for (int i = 0; i < corpus.size(); ++i) {
    const Sample& s = corpus.samples[i];
    if (static_cast<int>(s.features.size()) != features.rows())
      Fail(ErrorKind::kShape, "sample " + std::to_string(i) +
                                  " has the wrong feature dimension");
    features.col(i) =
        Eigen::Map<const Eigen::VectorXd>(s.features.data(), s.features.size());
    observed_labels.push_back(s.observed_label);
  }
}

EpochLog TrainEpochWithDecisions(Model& model, const TrainingData& data,
                                 std::span<const Decision> gate,
                                 PredictionStore& store, int epoch, double lr,
                                 const TrainConfig& config,
                                 SelfMovingAverage* moving_average) {
  const int n = data.size();
  if (static_cast<int>(gate.size()) != n)
    Fail(ErrorKind::kShape, "gate size does not match the corpus");
  if (store.num_samples() != n)
    Fail(ErrorKind::kShape, "prediction store size does not match the corpus");
  if (store.num_epochs_recorded() != epoch)
    Fail(ErrorKind::kState, "prediction store holds " +
                                std::to_string(store.num_epochs_recorded()) +
                                " epochs, cannot record epoch " +
                                std::to_string(epoch));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(DeriveSeed(config.seed, kShuffleTag + epoch));
  std::shuffle(order.begin(), order.end(), rng);

  EpochLog log;
  log.epoch = epoch;
  log.learning_rate = lr;
  for (Decision d : gate) (d == Decision::kClean ? log.num_selected : log.num_rejected)++;
  const SelectionReport report = SelectionMetrics(gate, *data.corpus);
  log.selection_precision = report.precision;
  log.selection_recall = report.recall;

  const int batch_size = config.batch_size;
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
  std::vector<char> mask;
  std::vector<double> gradient;
  double loss_sum = 0.0;
  int trained = 0;
  for (int start = 0; start < n; start += batch_size) {
    const int b = std::min(batch_size, n - start);
    inputs.resize(data.features.rows(), b);
    labels.resize(b);
    mask.resize(b);
    for (int j = 0; j < b; ++j) {
      const int id = order[start + j];
      inputs.col(j) = data.features.col(id);
      labels[j] = data.observed_labels[id];
      mask[j] = gate[id] == Decision::kClean ? 1 : 0;
    }
    const BatchOutput out = model.ForwardBackward(inputs, labels, mask, &gradient);
    if (out.num_trained > 0) model.ApplyAdam(gradient, lr, config.optimizer);
    loss_sum += out.loss_sum;
    trained += out.num_trained;
    for (int j = 0; j < b; ++j) {
      const int id = order[start + j];
      std::span<const double> probs(out.probabilities.col(j).data(),
                                    static_cast<size_t>(out.probabilities.rows()));
      store.RecordEpoch(id, probs, epoch);
      if (moving_average != nullptr) moving_average->Update(id, probs);
    }
  }
  if (trained > 0) log.mean_training_loss = loss_sum / trained;
  return log;
}

EpochLog TrainEpochAll(Model& model, const TrainingData& data,
                       PredictionStore& store, int epoch, double lr,
                       const TrainConfig& config,
                       SelfMovingAverage* moving_average) {
  const std::vector<Decision> gate(data.size(), Decision::kClean);
  return TrainEpochWithDecisions(model, data, gate, store, epoch, lr, config,
                                 moving_average);
}

std::vector<Decision> OrGateDecisions(const PredictionStore& store,
                                      const TrainingData& data, int epoch) {
  std::vector<Decision> gate(data.size());
  for (int t = 0; t < data.size(); ++t)
    gate[t] = store.OrGateDecision(t, data.observed_labels[t], epoch);
  return gate;
}

EpochLog TrainEpochGated(Model& model, const TrainingData& data,
                         PredictionStore& store, int epoch, double lr,
                         const TrainConfig& config,
                         SelfMovingAverage* moving_average) {
  const std::vector<Decision> gate = OrGateDecisions(store, data, epoch);
  return TrainEpochWithDecisions(model, data, gate, store, epoch, lr, config,
                                 moving_average);
}

RunResult RunExperiment(const TrainConfig& config, const NoisyCorpus& corpus,
                        const EvalSet& eval) {
  const auto started = std::chrono::steady_clock::now();
  const TrainConfig cfg =
      ResolveTrainConfig(config, corpus.num_classes(), corpus.config.feature_dim);
  if ((eval.test_corpus == nullptr) != (eval.trials == nullptr))
    Fail(ErrorKind::kConfig, "evaluation needs both a test corpus and trials");
  if (eval.test_corpus != nullptr &&
      eval.test_corpus->config.feature_dim != corpus.config.feature_dim)
    Fail(ErrorKind::kConfig, "test corpus feature dimension differs from training");

  const TrainingData data(corpus);
  RunResult result{cfg, {}, Model(cfg.model), std::nullopt, 0.0};
  Model& model = result.model;
  PredictionStore store(corpus.num_classes(), cfg.top_k, data.observed_labels,
                        cfg.retain_history);
  std::optional<SelfMovingAverage> moving_average;
  if (cfg.mode == Mode::kSelfBaseline)
    moving_average.emplace(data.size(), corpus.num_classes(), cfg.self_alpha);
  SelfMovingAverage* ma = moving_average ? &*moving_average : nullptr;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = LearningRateAtEpoch(cfg.optimizer, epoch);
    const bool early = cfg.mode == Mode::kBaseline || epoch < cfg.early_epochs;
    EpochLog log;
    if (early) {
      log = TrainEpochAll(model, data, store, epoch, lr, cfg, ma);
    } else if (cfg.mode == Mode::kSelfBaseline) {
      std::vector<Decision> gate(data.size());
      for (int t = 0; t < data.size(); ++t)
        gate[t] = ma->Decide(t, data.observed_labels[t]);
      log = TrainEpochWithDecisions(model, data, gate, store, epoch, lr, cfg, ma);
    } else {
      log = TrainEpochGated(model, data, store, epoch, lr, cfg, ma);
    }
    if (!early && log.num_selected == 0)
      LogWarning(std::string(ModeName(cfg.mode)) + ": no samples selected at epoch " +
                 std::to_string(epoch) + "; forward-only pass recorded");

    const bool last = epoch + 1 == cfg.max_epochs;
    if (eval.test_corpus != nullptr &&
        (last || (epoch + 1) % cfg.eval_interval == 0)) {
      const ScoredTrials scored = ScoreTrials(model, *eval.test_corpus, *eval.trials);
      log.eer = ComputeEer(scored).eer;
    }
    result.epochs.push_back(log);
  }
  if (!result.epochs.empty()) result.final_eer = result.epochs.back().eer;
  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

std::string EpochTableCsv(std::span<const EpochLog> epochs) {
  std::string out =
      "epoch,learning_rate,mean_training_loss,num_selected,num_rejected,"
      "selection_precision,selection_recall,eer\n";
  for (const EpochLog& e : epochs) {
    out += std::to_string(e.epoch) + "," + FormatMetric(e.learning_rate) + "," +
           OptionalCell(e.mean_training_loss) + "," +
           std::to_string(e.num_selected) + "," + std::to_string(e.num_rejected) +
           "," + OptionalCell(e.selection_precision) + "," +
           OptionalCell(e.selection_recall) + "," + OptionalCell(e.eer) + "\n";
  }
  return out;
}

void WriteRunDirectory(const RunResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path root(dir);

  WriteTextFile((root / "config.json").string(), ToJson(result.config).dump(2) + "\n");
  WriteTextFile((root / "epochs.csv").string(), EpochTableCsv(result.epochs));
  result.model.Save((root / "model.ckpt").string());

  nlohmann::ordered_json summary;
  summary["mode"] = ModeName(result.config.mode);
  summary["epochs"] = result.epochs.size();
  summary["final_eer"] = OptionalJson(result.final_eer);
  if (!result.epochs.empty()) {
    const EpochLog& last = result.epochs.back();
    summary["final_precision"] = OptionalJson(last.selection_precision);
    summary["final_recall"] = OptionalJson(last.selection_recall);
  }
  summary["checkpoint"] = "model.ckpt";
  summary["duration_seconds"] = result.duration_seconds;
  WriteTextFile((root / "result.json").string(), summary.dump(2) + "\n");
}

}  // namespace orgate
