// tools/orgate_cli.cpp

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

// Command-line front end: generate, train, sweep and report. Settings come
// from an optional JSON config file; command-line flags override it.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orgate/orgate.h"

namespace {

using nlohmann::json;

// Raised for failures that should end the command with a message.
struct CommandError {
  std::string message;
};

void Check(orgate_status status, const std::string& what) {
  if (status != ORGATE_OK)
    throw CommandError{what + ": " + orgate_status_name(status) + ": " +
                       orgate_last_error()};
}

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CommandError{"cannot read config file '" + path + "'"};
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    json j = json::parse(buffer.str());
    if (!j.is_object()) throw CommandError{"config file must hold a JSON object"};
    return j;
  } catch (const json::parse_error& e) {
    throw CommandError{"invalid JSON in '" + path + "': " + e.what()};
  }
}

template <typename T>
void Override(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

// Owning wrappers for the C handles.
struct Corpus {
  orgate_corpus* ptr = nullptr;
  ~Corpus() { orgate_corpus_free(ptr); }
};
struct Trials {
  orgate_trials* ptr = nullptr;
  ~Trials() { orgate_trials_free(ptr); }
};
struct Run {
  orgate_run* ptr = nullptr;
  ~Run() { orgate_run_free(ptr); }
};
struct CString {
  char* ptr = nullptr;
  ~CString() { orgate_string_free(ptr); }
};

std::string Cell(int has, double value) {
  if (!has) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

// ---- generate ----

struct GenerateArgs {
  std::string config;
  std::string out;
  std::string trials_out;
  std::optional<int> num_speakers, utterances, feature_dim, speaker_dim;
  std::optional<double> separation, stddev;
  std::optional<uint64_t> seed;
  std::optional<double> noise_rate;
  std::optional<uint64_t> noise_seed;
  std::optional<std::string> noise_mode;
  std::optional<int> num_target, num_nontarget;
  std::optional<uint64_t> trials_seed;
};

void RunGenerate(const GenerateArgs& a) {
  json cfg = LoadConfig(a.config);
  json corpus = cfg.value("corpus", json::object());
  Override(corpus, "num_speakers", a.num_speakers);
  Override(corpus, "utterances_per_speaker", a.utterances);
  Override(corpus, "feature_dim", a.feature_dim);
  Override(corpus, "speaker_dim", a.speaker_dim);
  Override(corpus, "class_separation", a.separation);
  Override(corpus, "within_class_stddev", a.stddev);
  Override(corpus, "seed", a.seed);
  Override(cfg, "noise_rate", a.noise_rate);
  Override(cfg, "noise_seed", a.noise_seed);
  Override(cfg, "noise_mode", a.noise_mode);
  Override(cfg, "num_target_trials", a.num_target);
  Override(cfg, "num_nontarget_trials", a.num_nontarget);
  Override(cfg, "trials_seed", a.trials_seed);
  for (const auto& item : cfg.items()) {
    static const char* const kKeys[] = {"corpus", "noise_rate", "noise_seed", "noise_mode",
                                        "num_target_trials", "num_nontarget_trials",
                                        "trials_seed"};
    bool known = false;
    for (const char* k : kKeys) known = known || item.key() == k;
    if (!known) throw CommandError{"unknown generate config key '" + item.key() + "'"};
  }

  Corpus clean;
  Check(orgate_corpus_generate(corpus.dump().c_str(), &clean.ptr), "generate");
  const double rate = cfg.value("noise_rate", 0.0);
  Corpus noisy;
  const std::string mode = cfg.value("noise_mode", std::string("bernoulli"));
  Check(orgate_corpus_inject_noise(clean.ptr, rate, cfg.value("noise_seed", uint64_t{1}),
                                   mode.c_str(), &noisy.ptr),
        "inject noise");
  Check(orgate_corpus_save(noisy.ptr, a.out.c_str()), "save corpus");
  std::cout << "wrote " << a.out << ": " << orgate_corpus_num_samples(noisy.ptr)
            << " samples, " << orgate_corpus_num_classes(noisy.ptr) << " speakers, "
            << orgate_corpus_num_corrupted(noisy.ptr) << " corrupted labels\n";

  if (!a.trials_out.empty()) {
    Trials trials;
    Check(orgate_trials_make(clean.ptr, cfg.value("num_target_trials", 2000),
                             cfg.value("num_nontarget_trials", 2000),
                             cfg.value("trials_seed", uint64_t{1}), &trials.ptr),
          "make trials");
    Check(orgate_trials_save(trials.ptr, a.trials_out.c_str()), "save trials");
    std::cout << "wrote " << a.trials_out << ": " << orgate_trials_size(trials.ptr)
              << " trials\n";
  }
}

// ---- train ----

struct TrainArgs {
  std::string config;
  std::string corpus, test_corpus, trials, out;
  std::optional<std::string> mode;
  std::optional<int> early_epochs, top_k, max_epochs, batch_size, eval_interval;
  std::optional<double> lr, self_alpha;
  std::optional<uint64_t> seed, model_seed;
};

void RunTrain(const TrainArgs& a) {
  json cfg = LoadConfig(a.config);
  Override(cfg, "mode", a.mode);
  Override(cfg, "early_epochs", a.early_epochs);
  Override(cfg, "top_k", a.top_k);
  Override(cfg, "max_epochs", a.max_epochs);
  Override(cfg, "batch_size", a.batch_size);
  Override(cfg, "eval_interval", a.eval_interval);
  Override(cfg, "self_alpha", a.self_alpha);
  Override(cfg, "seed", a.seed);
  if (a.lr) cfg["optimizer"]["initial_lr"] = *a.lr;
  if (a.model_seed) cfg["model"]["seed"] = *a.model_seed;
  if (a.test_corpus.empty() != a.trials.empty())
    throw CommandError{"--test-corpus and --trials must be given together"};

  Corpus train, test;
  Trials trials;
  Check(orgate_corpus_load(a.corpus.c_str(), &train.ptr), "load " + a.corpus);
  if (!a.test_corpus.empty()) {
    Check(orgate_corpus_load(a.test_corpus.c_str(), &test.ptr), "load " + a.test_corpus);
    Check(orgate_trials_load(a.trials.c_str(), test.ptr, &trials.ptr), "load " + a.trials);
  }
  Run run;
  Check(orgate_train(cfg.dump().c_str(), train.ptr, test.ptr, trials.ptr, &run.ptr), "train");

  std::cout << "epoch  lr          loss        selected  rejected  precision  recall     eer\n";
  for (int e = 0; e < orgate_run_num_epochs(run.ptr); ++e) {
    orgate_epoch_log log;
    Check(orgate_run_epoch(run.ptr, e, &log), "epoch log");
    char line[256];
    std::snprintf(line, sizeof(line), "%-6d %-11s %-11s %-9d %-9d %-10s %-10s %s\n",
                  log.epoch, Cell(1, log.learning_rate).c_str(),
                  Cell(log.has_mean_training_loss, log.mean_training_loss).c_str(),
                  log.num_selected, log.num_rejected,
                  Cell(log.has_precision, log.precision).c_str(),
                  Cell(log.has_recall, log.recall).c_str(),
                  Cell(log.has_eer, log.eer).c_str());
    std::cout << line;
  }
  Check(orgate_run_write(run.ptr, a.out.c_str()), "write " + a.out);
  std::cout << "wrote " << a.out << "\n";
}

// ---- sweep ----

struct SweepArgs {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::vector<double>> noise_rates;
  std::optional<std::vector<std::string>> modes;
  std::optional<std::vector<int>> snapshot_epochs;
  std::optional<int> repeats, eval_interval, max_epochs, threads;
  std::optional<uint64_t> seed;
  bool quiet = false;
  bool print_plan = false;
};

void RunSweep(const SweepArgs& a) {
  json cfg = LoadConfig(a.config);
  Override(cfg, "output_dir", a.output_dir);
  Override(cfg, "noise_rates", a.noise_rates);
  Override(cfg, "modes", a.modes);
  Override(cfg, "snapshot_epochs", a.snapshot_epochs);
  Override(cfg, "repeats", a.repeats);
  Override(cfg, "eval_interval", a.eval_interval);
  Override(cfg, "threads", a.threads);
  Override(cfg, "seed", a.seed);
  if (a.max_epochs) cfg["train"]["max_epochs"] = *a.max_epochs;

  CString plan;
  Check(orgate_plan_resolve(cfg.dump().c_str(), &plan.ptr), "plan");
  if (a.print_plan) {
    std::cout << plan.ptr;
    return;
  }
  if (cfg.value("output_dir", std::string()).empty())
    throw CommandError{"sweep needs an output directory (--output-dir or output_dir)"};
  Check(orgate_plan_run(plan.ptr, a.quiet ? 0 : 1, nullptr), "sweep");
  std::cout << "wrote " << cfg["output_dir"].get<std::string>() << "\n";
}

// ---- report ----

void RunReport(const std::string& results, const std::string& out) {
  Check(orgate_report(results.c_str(), out.c_str()), "report");
  std::cout << "wrote tables to " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage noisy-label training lab (OR-gate top-k selection)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", orgate_version());

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a synthetic corpus with label noise");
  g->add_option("--config", gen.config, "JSON config file")->check(CLI::ExistingFile);
  g->add_option("-o,--out", gen.out, "Output corpus file")->required();
  g->add_option("--trials-out", gen.trials_out, "Also write a trial list over the corpus");
  g->add_option("--num-speakers", gen.num_speakers);
  g->add_option("--utterances-per-speaker", gen.utterances);
  g->add_option("--feature-dim", gen.feature_dim);
  g->add_option("--speaker-dim", gen.speaker_dim);
  g->add_option("--class-separation", gen.separation);
  g->add_option("--within-class-stddev", gen.stddev);
  g->add_option("--seed", gen.seed);
  g->add_option("--noise-rate", gen.noise_rate);
  g->add_option("--noise-seed", gen.noise_seed);
  g->add_option("--noise-mode", gen.noise_mode)->check(CLI::IsMember({"bernoulli", "exact"}));
  g->add_option("--num-target-trials", gen.num_target);
  g->add_option("--num-nontarget-trials", gen.num_nontarget);
  g->add_option("--trials-seed", gen.trials_seed);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train one model");
  t->add_option("--config", tr.config, "JSON training config")->check(CLI::ExistingFile);
  t->add_option("--corpus", tr.corpus, "Training corpus")->required();
  t->add_option("--test-corpus", tr.test_corpus, "Evaluation corpus");
  t->add_option("--trials", tr.trials, "Trial list over the evaluation corpus");
  t->add_option("-o,--out", tr.out, "Run output directory")->required();
  t->add_option("--mode", tr.mode)
      ->check(CLI::IsMember(
          {"baseline", "orgate", "orgate_no_early", "orgate_k1", "self_baseline"}));
  t->add_option("--early-epochs", tr.early_epochs);
  t->add_option("--top-k", tr.top_k, "0 picks about 7% of the classes");
  t->add_option("--max-epochs", tr.max_epochs);
  t->add_option("--batch-size", tr.batch_size);
  t->add_option("--eval-interval", tr.eval_interval);
  t->add_option("--lr", tr.lr, "Initial learning rate");
  t->add_option("--self-alpha", tr.self_alpha);
  t->add_option("--seed", tr.seed, "Batch shuffling seed");
  t->add_option("--model-seed", tr.model_seed, "Weight initialization seed");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Run a noise-rate x mode experiment grid");
  s->add_option("--config", sw.config, "JSON plan file")->check(CLI::ExistingFile);
  s->add_option("-o,--output-dir", sw.output_dir);
  s->add_option("--noise-rates", sw.noise_rates)->delimiter(',');
  s->add_option("--modes", sw.modes)->delimiter(',');
  s->add_option("--snapshot-epochs", sw.snapshot_epochs)->delimiter(',');
  s->add_option("--repeats", sw.repeats);
  s->add_option("--eval-interval", sw.eval_interval);
  s->add_option("--max-epochs", sw.max_epochs);
  s->add_option("--threads", sw.threads);
  s->add_option("--seed", sw.seed);
  s->add_flag("-q,--quiet", sw.quiet, "No progress output");
  s->add_flag("--print-plan", sw.print_plan, "Print the resolved plan and exit");

  std::string results, report_out;
  auto* r = app.add_subcommand("report", "Re-emit tables from a results.json");
  r->add_option("--results", results, "results.json")->required();
  r->add_option("-o,--out", report_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) RunGenerate(gen);
    if (*t) RunTrain(tr);
    if (*s) RunSweep(sw);
    if (*r) RunReport(results, report_out);
  } catch (const CommandError& e) {
    std::cerr << "orgate: " << e.message << "\n";
    return 1;
  }
  return 0;
}
