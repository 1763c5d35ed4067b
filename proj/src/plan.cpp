// src/plan.cpp

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

#include "orgate/plan.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "orgate/config_io.hpp"
#include "orgate/error.hpp"
#include "orgate/util.hpp"

namespace orgate {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kResultsFormat = "orgate-results";
constexpr int kResultsVersion = 1;

std::string RateLabel(double rate) { return FormatMetric(rate); }

std::string PercentLabel(double rate) { return FormatMetric(rate * 100.0) + "%"; }

std::string CellName(Mode mode, double rate, int repeat) {
  return std::string(ModeName(mode)) + " eta=" + RateLabel(rate) +
         " repeat=" + std::to_string(repeat);
}

std::string OptionalCell(const std::optional<double>& v) {
  return v ? FormatMetric(*v) : std::string();
}

ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> OptionalFromJson(const json& j, const char* key) {
  if (!j.contains(key)) Fail(ErrorKind::kParse, std::string("missing '") + key + "'");
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) Fail(ErrorKind::kParse, std::string("'") + key + "' is not a number");
  return v.get<double>();
}

template <typename T>
T Required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    Fail(ErrorKind::kParse, std::string("missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorKind::kParse, std::string("bad value for '") + key + "': " + e.what());
  }
}

void MakeDirectory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());
}

size_t IndexOf(const std::vector<double>& rates, double rate) {
  return std::find(rates.begin(), rates.end(), rate) - rates.begin();
}

size_t IndexOf(const std::vector<Mode>& modes, Mode mode) {
  return std::find(modes.begin(), modes.end(), mode) - modes.begin();
}

// Data shared by all cells of one repeat.
struct RepeatData {
  NoisyCorpus test;
  TrialList trials;
  std::vector<NoisyCorpus> train;  // one per noise rate, in plan order
};

}  // namespace

ExperimentPlan::ExperimentPlan()
    : noise_rates{0.0, 0.05, 0.10, 0.20, 0.30, 0.50},
      modes(AllModes()),
      snapshot_epochs{5, 10, 20, 29} {
  corpus.class_separation = 12.0;
  corpus.speaker_dim = 16;
  train.optimizer.initial_lr = 2e-3;
  train.model.activation = Activation::kLinear;
}

void ExperimentPlan::Validate() const {
  corpus.Validate();
  if (test_speakers < 2 || test_utterances_per_speaker < 2)
    Fail(ErrorKind::kConfig, "test corpus needs >= 2 speakers and >= 2 utterances each");
  if (num_target_trials < 1 || num_nontarget_trials < 1)
    Fail(ErrorKind::kConfig, "need at least one target and one nontarget trial");
  if (noise_rates.empty()) Fail(ErrorKind::kConfig, "noise_rates is empty");
  for (size_t i = 0; i < noise_rates.size(); ++i) {
    const double eta = noise_rates[i];
    if (!(eta >= 0.0 && eta < 1.0))
      Fail(ErrorKind::kConfig, "noise rate " + FormatMetric(eta) + " outside [0, 1)");
    if (IndexOf(noise_rates, eta) != i)
      Fail(ErrorKind::kConfig, "duplicate noise rate " + FormatMetric(eta));
  }
  for (size_t i = 0; i < modes.size(); ++i)
    if (IndexOf(modes, modes[i]) != i)
      Fail(ErrorKind::kConfig, std::string("duplicate mode ") + ModeName(modes[i]));
  if (repeats < 1) Fail(ErrorKind::kConfig, "repeats must be >= 1");
  if (threads < 1) Fail(ErrorKind::kConfig, "threads must be >= 1");
  for (int e : snapshot_epochs)
    if (e < 0 || e >= train.max_epochs)
      Fail(ErrorKind::kConfig, "snapshot epoch " + std::to_string(e) +
                                   " outside [0, max_epochs)");
  for (Mode mode : modes) {
    TrainConfig cfg = train;
    cfg.mode = mode;
    ResolveTrainConfig(cfg, corpus.num_speakers, corpus.feature_dim);
  }
}

ordered_json ToJson(const ExperimentPlan& plan) {
  ordered_json j;
  ordered_json corpus = ToJson(plan.corpus);
  corpus.erase("seed");
  j["corpus"] = corpus;
  j["test_speakers"] = plan.test_speakers;
  j["test_utterances_per_speaker"] = plan.test_utterances_per_speaker;
  j["num_target_trials"] = plan.num_target_trials;
  j["num_nontarget_trials"] = plan.num_nontarget_trials;
  j["noise_rates"] = plan.noise_rates;
  j["noise_mode"] = NoiseModeName(plan.noise_mode);
  ordered_json modes = ordered_json::array();
  for (Mode m : plan.modes) modes.push_back(ModeName(m));
  j["modes"] = modes;
  j["repeats"] = plan.repeats;
  j["seed"] = plan.seed;
  j["eval_interval"] = plan.train.eval_interval;
  j["snapshot_epochs"] = plan.snapshot_epochs;
  ordered_json train = ToJson(plan.train);
  for (const char* key : {"mode", "seed", "eval_interval"}) train.erase(key);
  train["model"].erase("seed");
  train["model"].erase("feature_dim");
  train["model"].erase("num_classes");
  j["train"] = train;
  j["output_dir"] = plan.output_dir;
  j["threads"] = plan.threads;
  return j;
}

void MergeJson(const json& j, ExperimentPlan* plan) {
  if (!j.is_object()) Fail(ErrorKind::kConfig, "plan must be a JSON object");
  static const char* const kKeys[] = {
      "corpus", "test_speakers", "test_utterances_per_speaker", "num_target_trials",
      "num_nontarget_trials", "noise_rates", "noise_mode", "modes", "repeats",
      "seed", "eval_interval", "snapshot_epochs", "train", "output_dir", "threads"};
  for (const auto& item : j.items())
    if (std::find(std::begin(kKeys), std::end(kKeys), item.key()) == std::end(kKeys))
      Fail(ErrorKind::kConfig, "unknown plan key '" + item.key() + "'");

  auto read = [&j](const char* key, auto* out) {
    if (!j.contains(key)) return;
    try {
      *out = j.at(key).get<std::decay_t<decltype(*out)>>();
    } catch (const json::exception& e) {
      Fail(ErrorKind::kConfig, std::string("bad value for '") + key + "': " + e.what());
    }
  };
  if (j.contains("corpus")) MergeJson(j.at("corpus"), &plan->corpus);
  read("test_speakers", &plan->test_speakers);
  read("test_utterances_per_speaker", &plan->test_utterances_per_speaker);
  read("num_target_trials", &plan->num_target_trials);
  read("num_nontarget_trials", &plan->num_nontarget_trials);
  read("noise_rates", &plan->noise_rates);
  if (j.contains("noise_mode")) {
    std::string name;
    read("noise_mode", &name);
    plan->noise_mode = ParseNoiseMode(name);
  }
  if (j.contains("modes")) {
    std::vector<std::string> names;
    read("modes", &names);
    plan->modes.clear();
    for (const auto& name : names) plan->modes.push_back(ParseMode(name));
  }
  read("repeats", &plan->repeats);
  read("seed", &plan->seed);
  if (j.contains("train")) MergeJson(j.at("train"), &plan->train);
  read("eval_interval", &plan->train.eval_interval);
  read("snapshot_epochs", &plan->snapshot_epochs);
  read("output_dir", &plan->output_dir);
  read("threads", &plan->threads);
}

uint64_t RepeatSeeds::Noise(double noise_rate) const {
  return DeriveSeed(noise_base, std::bit_cast<uint64_t>(noise_rate));
}

RepeatSeeds SeedsForRepeat(uint64_t plan_seed, int repeat) {
  const uint64_t base = DeriveSeed(plan_seed, static_cast<uint64_t>(repeat));
  return RepeatSeeds{DeriveSeed(base, 1), DeriveSeed(base, 2), DeriveSeed(base, 3),
                     DeriveSeed(base, 4), DeriveSeed(base, 5), DeriveSeed(base, 6)};
}

ResultRow MakeResultRow(const RunResult& run, const NoisyCorpus& corpus,
                        double noise_rate, int repeat,
                        std::span<const int> snapshot_epochs) {
  ResultRow row;
  row.mode = run.config.mode;
  row.noise_rate = noise_rate;
  row.repeat = repeat;
  row.realized_noise_rate = corpus.RealizedNoiseRate();
  row.final_eer = run.final_eer;
  if (!run.epochs.empty()) {
    row.final_precision = run.epochs.back().selection_precision;
    row.final_recall = run.epochs.back().selection_recall;
  }
  for (int e : snapshot_epochs) {
    if (e < 0 || e >= static_cast<int>(run.epochs.size()))
      Fail(ErrorKind::kConfig, "snapshot epoch " + std::to_string(e) + " was not run");
    row.snapshots.push_back({run.epochs[e].selection_precision,
                             run.epochs[e].selection_recall});
  }
  return row;
}

void ResultsTable::CheckComplete() const {
  if (modes.empty()) Fail(ErrorKind::kInput, "results table has no modes");
  if (noise_rates.empty()) Fail(ErrorKind::kInput, "results table has no noise rates");
  if (repeats < 1) Fail(ErrorKind::kInput, "results table has no repeats");
  const size_t expected = modes.size() * noise_rates.size() * repeats;
  std::vector<char> seen(expected, 0);
  for (const ResultRow& row : rows) {
    const size_t m = IndexOf(modes, row.mode);
    const size_t r = IndexOf(noise_rates, row.noise_rate);
    const std::string cell = CellName(row.mode, row.noise_rate, row.repeat);
    if (m == modes.size() || r == noise_rates.size() || row.repeat < 0 ||
        row.repeat >= repeats)
      Fail(ErrorKind::kInput, "row outside the plan grid: " + cell);
    if (row.snapshots.size() != snapshot_epochs.size())
      Fail(ErrorKind::kInput, "row has wrong snapshot count: " + cell);
    char& flag = seen[(m * noise_rates.size() + r) * repeats + row.repeat];
    if (flag) Fail(ErrorKind::kInput, "duplicate row: " + cell);
    flag = 1;
  }
  for (size_t i = 0; i < expected; ++i) {
    if (seen[i]) continue;
    const size_t rep = i % repeats;
    const size_t r = (i / repeats) % noise_rates.size();
    const size_t m = i / repeats / noise_rates.size();
    Fail(ErrorKind::kInput, "missing row: " + CellName(modes[m], noise_rates[r],
                                                        static_cast<int>(rep)));
  }
}

std::vector<ResultRow> ResultsTable::OrderedRows() const {
  std::vector<ResultRow> out = rows;
  std::stable_sort(out.begin(), out.end(), [this](const ResultRow& a, const ResultRow& b) {
    const auto ka = std::make_tuple(IndexOf(modes, a.mode), IndexOf(noise_rates, a.noise_rate), a.repeat);
    const auto kb = std::make_tuple(IndexOf(modes, b.mode), IndexOf(noise_rates, b.noise_rate), b.repeat);
    return ka < kb;
  });
  return out;
}

const ResultRow& ResultsTable::Find(Mode mode, double noise_rate, int repeat) const {
  for (const ResultRow& row : rows)
    if (row.mode == mode && row.noise_rate == noise_rate && row.repeat == repeat)
      return row;
  Fail(ErrorKind::kLookup, "no row for " + CellName(mode, noise_rate, repeat));
}

ResultsTable RunPlan(const ExperimentPlan& plan, std::ostream* progress) {
  plan.Validate();
  if (plan.modes.empty()) Fail(ErrorKind::kInput, "plan has no modes");
  const bool write = !plan.output_dir.empty();
  const std::filesystem::path root(plan.output_dir);
  if (write) {
    MakeDirectory(root);
    WriteTextFile((root / "plan.json").string(), ToJson(plan).dump(2) + "\n");
  }

  const size_t num_rates = plan.noise_rates.size();
  std::vector<RepeatData> data(plan.repeats);
  for (int rep = 0; rep < plan.repeats; ++rep) {
    const RepeatSeeds seeds = SeedsForRepeat(plan.seed, rep);
    CorpusConfig train_cfg = plan.corpus;
    train_cfg.seed = seeds.train_corpus;
    CorpusConfig test_cfg = plan.corpus;
    test_cfg.num_speakers = plan.test_speakers;
    test_cfg.utterances_per_speaker = plan.test_utterances_per_speaker;
    test_cfg.seed = seeds.test_corpus;

    RepeatData& d = data[rep];
    d.test = GenerateCorpus(test_cfg);
    d.trials = MakeTrials(d.test, plan.num_target_trials, plan.num_nontarget_trials,
                          seeds.trials);
    const NoisyCorpus clean = GenerateCorpus(train_cfg);
    for (double eta : plan.noise_rates)
      d.train.push_back(InjectSymmetricNoise(clean, eta, seeds.Noise(eta), plan.noise_mode));

    if (write) {
      const auto dir = root / "data" / ("r" + std::to_string(rep));
      MakeDirectory(dir);
      SaveCorpus(d.test, (dir / "test.corpus").string());
      SaveTrials(d.trials, (dir / "trials.txt").string());
      for (size_t r = 0; r < num_rates; ++r)
        SaveCorpus(d.train[r], (dir / ("train_eta" + RateLabel(plan.noise_rates[r]) +
                                       ".corpus")).string());
    }
  }

  struct Cell {
    size_t mode;
    size_t rate;
    int repeat;
  };
  std::vector<Cell> cells;
  for (size_t m = 0; m < plan.modes.size(); ++m)
    for (size_t r = 0; r < num_rates; ++r)
      for (int rep = 0; rep < plan.repeats; ++rep) cells.push_back({m, r, rep});

  std::vector<std::optional<ResultRow>> rows(cells.size());
  struct Failure {
    ErrorKind kind;
    std::string message;
  };
  std::vector<std::optional<Failure>> failures(cells.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::atomic<size_t> done{0};
  std::mutex progress_mutex;

  auto run_cell = [&](size_t index) {
    const Cell& cell = cells[index];
    const Mode mode = plan.modes[cell.mode];
    const double eta = plan.noise_rates[cell.rate];
    const RepeatSeeds seeds = SeedsForRepeat(plan.seed, cell.repeat);
    const RepeatData& d = data[cell.repeat];
    const NoisyCorpus& corpus = d.train[cell.rate];

    TrainConfig cfg = plan.train;
    cfg.mode = mode;
    cfg.seed = seeds.shuffle;
    cfg.model.seed = seeds.model;
    const RunResult run = RunExperiment(cfg, corpus, {&d.test, &d.trials});
    if (write)
      WriteRunDirectory(run, (root / "runs" / ModeName(mode) / ("eta" + RateLabel(eta)) /
                              ("r" + std::to_string(cell.repeat))).string());
    rows[index] = MakeResultRow(run, corpus, eta, cell.repeat, plan.snapshot_epochs);
    if (progress != nullptr) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      *progress << "[" << ++done << "/" << cells.size() << "] "
                << CellName(mode, eta, cell.repeat) << " eer "
                << OptionalCell(run.final_eer) << " ("
                << FormatMetric(run.duration_seconds) << " s)" << std::endl;
    }
  };

  auto worker = [&] {
    for (;;) {
      if (failed) return;
      const size_t index = next++;
      if (index >= cells.size()) return;
      try {
        run_cell(index);
      } catch (const Error& e) {
        failures[index] = Failure{e.kind(), e.what()};
        failed = true;
      } catch (const std::exception& e) {
        failures[index] = Failure{ErrorKind::kState, e.what()};
        failed = true;
      }
    }
  };

  const int num_threads =
      std::min<int>(plan.threads, static_cast<int>(cells.size()));
  if (num_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < num_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (size_t i = 0; i < cells.size(); ++i) {
    if (!failures[i]) continue;
    const Cell& cell = cells[i];
    Fail(failures[i]->kind,
         "plan aborted at cell " +
             CellName(plan.modes[cell.mode], plan.noise_rates[cell.rate], cell.repeat) +
             ": " + failures[i]->message);
  }

  ResultsTable table;
  table.modes = plan.modes;
  table.noise_rates = plan.noise_rates;
  table.repeats = plan.repeats;
  table.snapshot_epochs = plan.snapshot_epochs;
  for (auto& row : rows) table.rows.push_back(std::move(*row));
  if (write) EmitTables(table, plan.output_dir);
  return table;
}

std::string ResultsCsv(const ResultsTable& table) {
  std::string out =
      "mode,noise_rate,repeat,realized_noise_rate,final_eer,final_precision,final_recall";
  for (int e : table.snapshot_epochs)
    out += ",precision_epoch" + std::to_string(e) + ",recall_epoch" + std::to_string(e);
  out += "\n";
  for (const ResultRow& row : table.OrderedRows()) {
    out += std::string(ModeName(row.mode)) + "," + FormatMetric(row.noise_rate) + "," +
           std::to_string(row.repeat) + "," + FormatMetric(row.realized_noise_rate) +
           "," + OptionalCell(row.final_eer) + "," + OptionalCell(row.final_precision) +
           "," + OptionalCell(row.final_recall);
    for (const SnapshotMetrics& s : row.snapshots)
      out += "," + OptionalCell(s.precision) + "," + OptionalCell(s.recall);
    out += "\n";
  }
  return out;
}

std::string EerByRateCsv(const ResultsTable& table) {
  std::string out = "mode";
  for (double eta : table.noise_rates) out += "," + PercentLabel(eta);
  out += "\n";
  for (Mode mode : table.modes) {
    out += ModeName(mode);
    for (double eta : table.noise_rates) {
      double sum = 0.0;
      int count = 0;
      for (int rep = 0; rep < table.repeats; ++rep) {
        const ResultRow& row = table.Find(mode, eta, rep);
        if (row.final_eer) {
          sum += *row.final_eer;
          ++count;
        }
      }
      out += ",";
      if (count == table.repeats) out += FormatMetric(sum / count);
    }
    out += "\n";
  }
  return out;
}

std::string ResultsJson(const ResultsTable& table) {
  ordered_json j;
  j["format"] = kResultsFormat;
  j["version"] = kResultsVersion;
  ordered_json modes = ordered_json::array();
  for (Mode m : table.modes) modes.push_back(ModeName(m));
  j["modes"] = modes;
  j["noise_rates"] = table.noise_rates;
  j["repeats"] = table.repeats;
  j["snapshot_epochs"] = table.snapshot_epochs;
  ordered_json rows = ordered_json::array();
  for (const ResultRow& row : table.OrderedRows()) {
    ordered_json r;
    r["mode"] = ModeName(row.mode);
    r["noise_rate"] = row.noise_rate;
    r["repeat"] = row.repeat;
    r["realized_noise_rate"] = row.realized_noise_rate;
    r["final_eer"] = OptionalJson(row.final_eer);
    r["final_precision"] = OptionalJson(row.final_precision);
    r["final_recall"] = OptionalJson(row.final_recall);
    ordered_json snaps = ordered_json::array();
    for (size_t i = 0; i < row.snapshots.size(); ++i) {
      ordered_json s;
      s["epoch"] = table.snapshot_epochs[i];
      s["precision"] = OptionalJson(row.snapshots[i].precision);
      s["recall"] = OptionalJson(row.snapshots[i].recall);
      snaps.push_back(s);
    }
    r["snapshots"] = snaps;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

ResultsTable ParseResultsJson(const std::string& text) {
  const json j = ParseJsonText(text);
  if (!j.is_object() || !j.contains("format") || j.at("format") != kResultsFormat)
    Fail(ErrorKind::kFormat, "not an orgate results file");
  if (Required<int>(j, "version") != kResultsVersion)
    Fail(ErrorKind::kFormat, "unsupported results version");

  ResultsTable table;
  auto parse_mode = [](const std::string& name) {
    try {
      return ParseMode(name);
    } catch (const Error& e) {
      Fail(ErrorKind::kParse, e.what());
    }
  };
  for (const auto& name : Required<std::vector<std::string>>(j, "modes"))
    table.modes.push_back(parse_mode(name));
  table.noise_rates = Required<std::vector<double>>(j, "noise_rates");
  table.repeats = Required<int>(j, "repeats");
  table.snapshot_epochs = Required<std::vector<int>>(j, "snapshot_epochs");
  const json rows = Required<json>(j, "rows");
  if (!rows.is_array()) Fail(ErrorKind::kParse, "'rows' must be an array");
  for (size_t i = 0; i < rows.size(); ++i) {
    const json& r = rows[i];
    try {
      ResultRow row;
      row.mode = parse_mode(Required<std::string>(r, "mode"));
      row.noise_rate = Required<double>(r, "noise_rate");
      row.repeat = Required<int>(r, "repeat");
      row.realized_noise_rate = Required<double>(r, "realized_noise_rate");
      row.final_eer = OptionalFromJson(r, "final_eer");
      row.final_precision = OptionalFromJson(r, "final_precision");
      row.final_recall = OptionalFromJson(r, "final_recall");
      const json snaps = Required<json>(r, "snapshots");
      if (!snaps.is_array()) Fail(ErrorKind::kParse, "'snapshots' must be an array");
      for (const json& s : snaps)
        row.snapshots.push_back(
            {OptionalFromJson(s, "precision"), OptionalFromJson(s, "recall")});
      table.rows.push_back(std::move(row));
    } catch (const Error& e) {
      Fail(e.kind(), "row " + std::to_string(i) + ": " + e.what());
    }
  }
  return table;
}

void EmitTables(const ResultsTable& table, const std::string& dir,
                std::span<const TableFormat> formats) {
  table.CheckComplete();
  if (formats.empty()) Fail(ErrorKind::kInput, "no table format requested");
  const std::filesystem::path root(dir);
  MakeDirectory(root);
  for (TableFormat format : formats) {
    if (format == TableFormat::kCsv) {
      WriteTextFile((root / "results.csv").string(), ResultsCsv(table));
      WriteTextFile((root / "eer_by_rate.csv").string(), EerByRateCsv(table));
    } else {
      WriteTextFile((root / "results.json").string(), ResultsJson(table));
    }
  }
}

void EmitTables(const ResultsTable& table, const std::string& dir) {
  static constexpr TableFormat kAll[] = {TableFormat::kCsv, TableFormat::kJson};
  EmitTables(table, dir, kAll);
}

ResultsTable Report(const std::string& results_json_path,
                    const std::string& output_dir) {
  ResultsTable table = ParseResultsJson(ReadTextFile(results_json_path));
  EmitTables(table, output_dir);
  return table;
}

}  // namespace orgate
