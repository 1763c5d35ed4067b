// tests/test_trainer.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "orgate/dataset.hpp"
#include "orgate/error.hpp"
#include "orgate/trainer.hpp"
#include "orgate/util.hpp"
#include "test_util.hpp"

using namespace orgate;

namespace {

NoisyCorpus Corpus(int c, int u, double eta, double separation = 6.0) {
  CorpusConfig cfg;
  cfg.num_speakers = c;
  cfg.utterances_per_speaker = u;
  cfg.feature_dim = 6;
  cfg.class_separation = separation;
  cfg.seed = 21;
  return InjectSymmetricNoise(GenerateCorpus(cfg), eta, 22);
}

TrainConfig SmallConfig(const NoisyCorpus& corpus, Mode mode = Mode::kOrGate) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.early_epochs = 2;
  cfg.max_epochs = 5;
  cfg.batch_size = 16;
  cfg.optimizer.initial_lr = 5e-3;
  cfg.model.hidden_dims = {16};
  cfg.model.embedding_dim = 8;
  cfg.seed = 4;
  return ResolveTrainConfig(cfg, corpus.num_classes(), corpus.config.feature_dim);
}

}  // namespace

TEST_CASE("stage I trains every sample and records once per epoch") {
  const NoisyCorpus corpus = Corpus(4, 25, 0.2);
  const TrainConfig cfg = SmallConfig(corpus);
  const TrainingData data(corpus);
  Model model(cfg.model);
  PredictionStore store(4, cfg.top_k, data.observed_labels, true);
  const EpochLog log = TrainEpochAll(model, data, store, 0, 1e-3, cfg);
  CHECK(log.num_selected == 100);
  CHECK(log.num_rejected == 0);
  for (int t = 0; t < 100; ++t) CHECK(store.History(t).size() == 1);
  CHECK(store.num_epochs_recorded() == 1);
  CHECK(ErrorKindOf([&] { TrainEpochAll(model, data, store, 0, 1e-3, cfg); }) ==
        ErrorKind::kState);
}

TEST_CASE("stage I loss decreases on a separable toy corpus") {
  const NoisyCorpus corpus = Corpus(3, 30, 0.0, 12.0);
  TrainConfig cfg = SmallConfig(corpus);
  const TrainingData data(corpus);
  Model model(cfg.model);
  PredictionStore store(3, cfg.top_k, data.observed_labels, false);
  std::vector<double> losses;
  for (int e = 0; e < 5; ++e)
    losses.push_back(*TrainEpochAll(model, data, store, e, 5e-3, cfg).mean_training_loss);
  int increases = 0;
  for (int e = 1; e < 5; ++e) increases += losses[e] >= losses[e - 1];
  CHECK(increases <= 1);
  CHECK(losses.back() < losses.front());
}

TEST_CASE("all-noisy gate leaves the model untouched") {
  const NoisyCorpus corpus = Corpus(4, 10, 0.3);
  const TrainConfig cfg = SmallConfig(corpus);
  const TrainingData data(corpus);
  Model model(cfg.model);
  const Model before = model;
  PredictionStore store(4, cfg.top_k, data.observed_labels, false);
  const std::vector<Decision> gate(data.size(), Decision::kNoisy);
  const EpochLog log = TrainEpochWithDecisions(model, data, gate, store, 0, 1e-2, cfg);
  CHECK(model == before);
  CHECK(log.num_selected == 0);
  CHECK_FALSE(log.mean_training_loss.has_value());
  CHECK_FALSE(log.selection_precision.has_value());
  CHECK(store.num_epochs_recorded() == 1);
}

TEST_CASE("no-leak: noisy samples' features never reach the parameters") {
  const NoisyCorpus corpus = Corpus(5, 20, 0.3);
  const TrainConfig cfg = SmallConfig(corpus);
  const TrainingData data(corpus);
  TrainingData scrambled = data;
  std::vector<Decision> gate(data.size());
  for (int t = 0; t < data.size(); ++t) {
    gate[t] = t % 3 == 0 ? Decision::kNoisy : Decision::kClean;
    if (gate[t] == Decision::kNoisy) scrambled.features.col(t).setConstant(1e3 + t);
  }
  Model a(cfg.model), b(cfg.model);
  PredictionStore sa(5, cfg.top_k, data.observed_labels, true);
  PredictionStore sb(5, cfg.top_k, data.observed_labels, true);
  TrainEpochWithDecisions(a, data, gate, sa, 0, 1e-2, cfg);
  TrainEpochWithDecisions(b, scrambled, gate, sb, 0, 1e-2, cfg);
  CHECK(a == b);
  // Trained samples' records match; scrambled noisy ones may differ.
  for (int t = 0; t < data.size(); ++t)
    if (gate[t] == Decision::kClean) CHECK(sa.History(t)[0].labels == sb.History(t)[0].labels);
}

TEST_CASE("gated epoch with k = c is the all-samples epoch") {
  const NoisyCorpus corpus = Corpus(4, 15, 0.4);
  TrainConfig cfg = SmallConfig(corpus);
  cfg.top_k = 4;
  const TrainingData data(corpus);
  Model a(cfg.model), b(cfg.model);
  PredictionStore sa(4, 4, data.observed_labels, false);
  PredictionStore sb(4, 4, data.observed_labels, false);
  TrainEpochAll(a, data, sa, 0, 1e-3, cfg);
  TrainEpochAll(b, data, sb, 0, 1e-3, cfg);
  const std::vector<Decision> gate = OrGateDecisions(sa, data, 1);
  CHECK(std::all_of(gate.begin(), gate.end(), [](Decision d) { return d == Decision::kClean; }));
  const EpochLog la = TrainEpochGated(a, data, sa, 1, 1e-3, cfg);
  const EpochLog lb = TrainEpochAll(b, data, sb, 1, 1e-3, cfg);
  CHECK(la == lb);
  CHECK(a == b);
}

TEST_CASE("config resolution") {
  const NoisyCorpus corpus = Corpus(50, 2, 0.0);
  TrainConfig cfg;
  CHECK(DefaultTopK(50) == 4);
  CHECK(DefaultTopK(5) == 1);
  CHECK(DefaultTopK(1211) == 85);
  CHECK(ResolveTrainConfig(cfg, 50, 6).top_k == 4);
  cfg.mode = Mode::kOrGateNoEarly;
  CHECK(ResolveTrainConfig(cfg, 50, 6).early_epochs == 0);
  cfg.mode = Mode::kOrGateK1;
  cfg.top_k = 7;
  CHECK(ResolveTrainConfig(cfg, 50, 6).top_k == 1);

  auto fails = [](TrainConfig c) {
    CHECK(ErrorKindOf([&] { ResolveTrainConfig(c, 50, 6); }) == ErrorKind::kConfig);
  };
  TrainConfig bad;
  bad.early_epochs = 30;
  fails(bad);
  bad = TrainConfig{};
  bad.top_k = 51;
  fails(bad);
  bad = TrainConfig{};
  bad.batch_size = 0;
  fails(bad);
  bad = TrainConfig{};
  bad.self_alpha = 1.5;
  fails(bad);
  bad = TrainConfig{};
  bad.mode = Mode::kSelfBaseline;
  bad.early_epochs = 0;
  fails(bad);
  bad = TrainConfig{};
  bad.optimizer.lr_decay_factor = 0.0;
  fails(bad);
  CHECK(ParseMode("orgate_k1") == Mode::kOrGateK1);
  CHECK(ErrorKindOf([] { ParseMode("bogus"); }) == ErrorKind::kConfig);
}

TEST_CASE("run: modes, stage boundary, accounting and determinism") {
  const NoisyCorpus corpus = Corpus(5, 20, 0.3);
  CorpusConfig test_cfg = corpus.config;
  test_cfg.num_speakers = 4;
  test_cfg.utterances_per_speaker = 5;
  test_cfg.seed = 77;
  const NoisyCorpus test = GenerateCorpus(test_cfg);
  const TrialList trials = MakeTrials(test, 20, 20, 1);
  SetWarningsEnabled(false);

  for (Mode mode : AllModes()) {
    CAPTURE(ModeName(mode));
    TrainConfig cfg = SmallConfig(corpus, mode);
    cfg.eval_interval = 2;
    const RunResult r = RunExperiment(cfg, corpus, {&test, &trials});
    REQUIRE(r.epochs.size() == 5);
    const int w = mode == Mode::kBaseline ? 5 : r.config.early_epochs;
    int prev_selected = 0;
    for (const EpochLog& e : r.epochs) {
      CHECK(e.num_selected + e.num_rejected == 100);
      if (e.epoch < w) CHECK(e.num_rejected == 0);
      CHECK(e.eer.has_value() == (e.epoch == 1 || e.epoch == 3 || e.epoch == 4));
      // The OR-gate only ever adds samples once Stage II starts.
      if (mode != Mode::kSelfBaseline && mode != Mode::kBaseline && e.epoch > w)
        CHECK(e.num_selected >= prev_selected);
      prev_selected = e.num_selected;
    }
    CHECK(r.final_eer == r.epochs.back().eer);
    if (mode == Mode::kOrGateNoEarly) {
      CHECK(r.epochs[0].num_selected == 0);
      CHECK_FALSE(r.epochs[0].mean_training_loss.has_value());
    }

    const RunResult again = RunExperiment(cfg, corpus, {&test, &trials});
    CHECK(again.epochs == r.epochs);
    CHECK(again.model == r.model);
  }
  SetWarningsEnabled(true);
}

TEST_CASE("no-early epoch 0 performs no update") {
  const NoisyCorpus corpus = Corpus(4, 10, 0.2);
  const TrainConfig cfg = SmallConfig(corpus, Mode::kOrGateNoEarly);
  const TrainingData data(corpus);
  Model model(cfg.model);
  const Model before = model;
  PredictionStore store(4, cfg.top_k, data.observed_labels, false);
  const EpochLog log = TrainEpochGated(model, data, store, 0, 1e-2, cfg);
  CHECK(model == before);
  CHECK(log.num_selected == 0);
}

TEST_CASE("run directory contents") {
  TempDir dir;
  const NoisyCorpus corpus = Corpus(3, 10, 0.1);
  TrainConfig cfg = SmallConfig(corpus);
  const RunResult r = RunExperiment(cfg, corpus, {});
  CHECK_FALSE(r.final_eer.has_value());
  WriteRunDirectory(r, dir.path("run"));
  for (const char* f : {"config.json", "epochs.csv", "model.ckpt", "result.json"})
    CHECK(std::filesystem::exists(dir.path(std::string("run/") + f)));
  CHECK(Model::Load(dir.path("run/model.ckpt")) == r.model);
  const std::string csv = ReadTextFile(dir.path("run/epochs.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.rfind("epoch,learning_rate,mean_training_loss,num_selected", 0) == 0);
}
