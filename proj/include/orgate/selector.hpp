// include/orgate/selector.hpp

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

#ifndef ORGATE_SELECTOR_HPP_
#define ORGATE_SELECTOR_HPP_

#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace orgate {

enum class Decision { kNoisy = 0, kClean = 1 };

/**
   Returns the k labels with the largest probability, sorted by label index.
   Ties in probability go to the lower label index, so the result is fully
   determined by the input. Throws kConfig unless 1 <= k <= size, and
   kNumeric on NaN or infinite entries.
*/
std::vector<int> TopKLabels(std::span<const double> probabilities, int k);

/// Lowest index among the maxima. Throws kNumeric on non-finite input.
int ArgMax(std::span<const double> probabilities);

struct TopKSet {
  int epoch = 0;
  std::vector<int> labels;  // sorted ascending, size k
};

/**
   Per-sample record of the top-k prediction sets seen so far, and the
   OR-gate decision over them.

   The store is append-only: sample t receives exactly one record per epoch,
   in epoch order. With history retention off, each sample keeps only the
   epoch at which its own observed label first showed up in a top-k set,
   which is all the gate needs. With retention on, every set is kept, and
   the gate is evaluated over the full history instead.
*/
class PredictionStore {
 public:
  PredictionStore(int num_classes, int k, std::vector<int> observed_labels,
                  bool retain_history);

  int k() const { return k_; }
  int num_classes() const { return num_classes_; }
  int num_samples() const { return static_cast<int>(labels_.size()); }
  bool retains_history() const { return retain_history_; }

  /// Number of epochs recorded for every sample (min over samples).
  int num_epochs_recorded() const;
  int EpochsRecorded(int sample_id) const;

  /// Appends the top-k set of `probabilities` as this sample's record for
  /// `epoch`. Throws kState unless epoch == EpochsRecorded(sample_id).
  void RecordEpoch(int sample_id, std::span<const double> probabilities,
                   int epoch);

  /// Clean iff `observed_label` is in a recorded top-k set of some epoch
  /// strictly before `current_epoch`.
  Decision OrGateDecision(int sample_id, int observed_label,
                          int current_epoch) const;

  /// First epoch at which the sample's own label matched, if any.
  std::optional<int> FirstMatchEpoch(int sample_id) const;
  bool MatchedEver(int sample_id) const;

  /// Only valid with history retention; throws kState otherwise.
  const std::vector<TopKSet>& History(int sample_id) const;

  /// One `sample_id,epoch,matched,first_match_epoch` line per sample.
  /// `matched` is the cumulative flag as of `epoch`; first_match_epoch is -1
  /// while unmatched.
  void DumpEpoch(int epoch, std::ostream& os) const;

 private:
  void CheckSample(int sample_id) const;

  int num_classes_;
  int k_;
  bool retain_history_;
  std::vector<int> labels_;
  std::vector<int> epochs_recorded_;
  std::vector<int> first_match_;  // -1 = never
  std::vector<std::vector<TopKSet>> history_;
};

/// Exponential moving average of per-sample predictions, with the first
/// update taken verbatim.
class SelfMovingAverage {
 public:
  SelfMovingAverage(int num_samples, int num_classes, double alpha);

  double alpha() const { return alpha_; }
  bool Initialized(int sample_id) const;
  void Update(int sample_id, std::span<const double> probabilities);
  std::span<const double> Average(int sample_id) const;
  /// Clean iff the argmax of the average equals the label.
  Decision Decide(int sample_id, int observed_label) const;

 private:
  void CheckSample(int sample_id) const;

  int num_classes_;
  double alpha_;
  std::vector<char> initialized_;
  std::vector<double> average_;
};

}  // namespace orgate

#endif  // ORGATE_SELECTOR_HPP_
