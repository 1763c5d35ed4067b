// include/orgate/plan.hpp

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

#ifndef ORGATE_PLAN_HPP_
#define ORGATE_PLAN_HPP_

#include <json.hpp>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "orgate/dataset.hpp"
#include "orgate/trainer.hpp"

namespace orgate {

/**
   A grid of runs: every (mode, noise rate, repeat) cell trains one model.

   Seeds are derived from `seed` and the repeat index. Within a repeat all
   cells share the clean training features, the test corpus and the trial
   list; each noise rate draws its own noise mask, which every mode at that
   rate then reuses.
*/
struct ExperimentPlan {
  ExperimentPlan();  // the default desk-scale benchmark

  CorpusConfig corpus;  // training speakers; corpus.seed is ignored
  int test_speakers = 20;
  int test_utterances_per_speaker = 20;
  int num_target_trials = 2000;
  int num_nontarget_trials = 2000;
  std::vector<double> noise_rates;
  NoiseMode noise_mode = NoiseMode::kBernoulli;
  std::vector<Mode> modes;
  int repeats = 1;
  uint64_t seed = 1;
  TrainConfig train;  // mode and seeds are set per cell
  std::vector<int> snapshot_epochs;
  std::string output_dir;  // empty: keep results in memory only
  int threads = 1;

  void Validate() const;
};

nlohmann::ordered_json ToJson(const ExperimentPlan& plan);
/// Same merge semantics as the other config structs. The top-level
/// "eval_interval" key is an alias for train.eval_interval.
void MergeJson(const nlohmann::json& j, ExperimentPlan* plan);

/// Seeds used by one repeat of a plan.
struct RepeatSeeds {
  uint64_t train_corpus;
  uint64_t test_corpus;
  uint64_t trials;
  uint64_t model;
  uint64_t shuffle;
  uint64_t noise_base;

  /// Noise-mask seed for one rate; depends on the rate, not its position.
  uint64_t Noise(double noise_rate) const;
};

RepeatSeeds SeedsForRepeat(uint64_t plan_seed, int repeat);

struct SnapshotMetrics {
  std::optional<double> precision;
  std::optional<double> recall;

  bool operator==(const SnapshotMetrics&) const = default;
};

struct ResultRow {
  Mode mode = Mode::kBaseline;
  double noise_rate = 0.0;
  int repeat = 0;
  double realized_noise_rate = 0.0;
  std::optional<double> final_eer;
  std::optional<double> final_precision;
  std::optional<double> final_recall;
  std::vector<SnapshotMetrics> snapshots;  // parallel to snapshot_epochs

  bool operator==(const ResultRow&) const = default;
};

struct ResultsTable {
  std::vector<Mode> modes;
  std::vector<double> noise_rates;
  int repeats = 0;
  std::vector<int> snapshot_epochs;
  std::vector<ResultRow> rows;

  /// Throws kInput unless the rows cover the grid exactly once each.
  void CheckComplete() const;
  /// Rows ordered by mode, then noise rate, then repeat, following the
  /// order of `modes` and `noise_rates`.
  std::vector<ResultRow> OrderedRows() const;
  const ResultRow& Find(Mode mode, double noise_rate, int repeat) const;

  bool operator==(const ResultsTable&) const = default;
};

/// Builds the row for one finished run.
ResultRow MakeResultRow(const RunResult& run, const NoisyCorpus& corpus,
                        double noise_rate, int repeat,
                        std::span<const int> snapshot_epochs);

/**
   Runs every cell of the plan. With a non-empty output_dir the shared data,
   each run's directory and the tables are written there. A failing cell
   aborts the plan with an error naming the cell. Progress lines go to
   `progress` when given.
*/
ResultsTable RunPlan(const ExperimentPlan& plan, std::ostream* progress = nullptr);

enum class TableFormat { kCsv, kJson };

/// Writes results.csv and eer_by_rate.csv (kCsv) and results.json (kJson)
/// into `dir`. The table is checked before anything is written.
void EmitTables(const ResultsTable& table, const std::string& dir,
                std::span<const TableFormat> formats);
void EmitTables(const ResultsTable& table, const std::string& dir);

std::string ResultsCsv(const ResultsTable& table);
std::string EerByRateCsv(const ResultsTable& table);
std::string ResultsJson(const ResultsTable& table);
ResultsTable ParseResultsJson(const std::string& text);

/// Re-emits the tables stored in a results.json file.
ResultsTable Report(const std::string& results_json_path,
                    const std::string& output_dir);

}  // namespace orgate

#endif  // ORGATE_PLAN_HPP_
