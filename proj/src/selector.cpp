// src/selector.cpp

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

#include "orgate/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "orgate/error.hpp"

namespace orgate {

namespace {

void CheckFinite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v))
      Fail(ErrorKind::kNumeric, "non-finite prediction probability");
}

}  // namespace

std::vector<int> TopKLabels(std::span<const double> probabilities, int k) {
  const int c = static_cast<int>(probabilities.size());
  if (k < 1 || k > c)
    Fail(ErrorKind::kConfig, "top-k size " + std::to_string(k) +
                                 " outside [1, " + std::to_string(c) + "]");
  CheckFinite(probabilities);
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](int a, int b) {
                      if (probabilities[a] != probabilities[b])
                        return probabilities[a] > probabilities[b];
                      return a < b;
                    });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

int ArgMax(std::span<const double> probabilities) {
  if (probabilities.empty()) Fail(ErrorKind::kShape, "argmax of empty vector");
  CheckFinite(probabilities);
  int best = 0;
  for (int j = 1; j < static_cast<int>(probabilities.size()); ++j)
    if (probabilities[j] > probabilities[best]) best = j;
  return best;
}

PredictionStore::PredictionStore(int num_classes, int k,
                                 std::vector<int> observed_labels,
                                 bool retain_history)
    : num_classes_(num_classes),
      k_(k),
      retain_history_(retain_history),
      labels_(std::move(observed_labels)) {
  if (num_classes_ < 1) Fail(ErrorKind::kConfig, "num_classes must be >= 1");
  if (k_ < 1 || k_ > num_classes_)
    Fail(ErrorKind::kConfig, "k must lie in [1, num_classes]");
  for (int label : labels_)
    if (label < 0 || label >= num_classes_)
      Fail(ErrorKind::kConfig, "observed label out of range");
  epochs_recorded_.assign(labels_.size(), 0);
  first_match_.assign(labels_.size(), -1);
  if (retain_history_) history_.resize(labels_.size());
}

void PredictionStore::CheckSample(int sample_id) const {
  if (sample_id < 0 || sample_id >= num_samples())
    Fail(ErrorKind::kLookup, "unknown sample id " + std::to_string(sample_id));
}

int PredictionStore::num_epochs_recorded() const {
  if (epochs_recorded_.empty()) return 0;
  return *std::min_element(epochs_recorded_.begin(), epochs_recorded_.end());
}

int PredictionStore::EpochsRecorded(int sample_id) const {
  CheckSample(sample_id);
  return epochs_recorded_[sample_id];
}

void PredictionStore::RecordEpoch(int sample_id,
                                  std::span<const double> probabilities,
                                  int epoch) {
  CheckSample(sample_id);
  if (static_cast<int>(probabilities.size()) != num_classes_)
    Fail(ErrorKind::kShape, "prediction length " +
                                std::to_string(probabilities.size()) +
                                " != num_classes " + std::to_string(num_classes_));
  if (epoch != epochs_recorded_[sample_id])
    Fail(ErrorKind::kState,
         "sample " + std::to_string(sample_id) + ": expected epoch " +
             std::to_string(epochs_recorded_[sample_id]) + ", got " +
             std::to_string(epoch));
  std::vector<int> labels = TopKLabels(probabilities, k_);
  if (first_match_[sample_id] < 0 &&
      std::binary_search(labels.begin(), labels.end(), labels_[sample_id]))
    first_match_[sample_id] = epoch;
  if (retain_history_)
    history_[sample_id].push_back(TopKSet{epoch, std::move(labels)});
  ++epochs_recorded_[sample_id];
}

Decision PredictionStore::OrGateDecision(int sample_id, int observed_label,
                                         int current_epoch) const {
  CheckSample(sample_id);
  if (epochs_recorded_[sample_id] < current_epoch)
    Fail(ErrorKind::kState, "sample " + std::to_string(sample_id) +
                                " lacks records for epochs before " +
                                std::to_string(current_epoch));
  if (retain_history_) {
    for (const TopKSet& set : history_[sample_id]) {
      if (set.epoch >= current_epoch) break;
      if (std::binary_search(set.labels.begin(), set.labels.end(),
                             observed_label))
        return Decision::kClean;
    }
    return Decision::kNoisy;
  }
  if (observed_label != labels_[sample_id])
    Fail(ErrorKind::kState,
         "compressed store only tracks the sample's registered label");
  const int first = first_match_[sample_id];
  return (first >= 0 && first < current_epoch) ? Decision::kClean
                                               : Decision::kNoisy;
}

std::optional<int> PredictionStore::FirstMatchEpoch(int sample_id) const {
  CheckSample(sample_id);
  if (first_match_[sample_id] < 0) return std::nullopt;
  return first_match_[sample_id];
}

bool PredictionStore::MatchedEver(int sample_id) const {
  return FirstMatchEpoch(sample_id).has_value();
}

const std::vector<TopKSet>& PredictionStore::History(int sample_id) const {
  CheckSample(sample_id);
  if (!retain_history_)
    Fail(ErrorKind::kState, "prediction history is not retained");
  return history_[sample_id];
}

void PredictionStore::DumpEpoch(int epoch, std::ostream& os) const {
  for (int t = 0; t < num_samples(); ++t) {
    const int first = first_match_[t];
    const bool matched = first >= 0 && first <= epoch;
    os << t << ',' << epoch << ',' << (matched ? 1 : 0) << ','
       << (matched ? first : -1) << '\n';
  }
}

SelfMovingAverage::SelfMovingAverage(int num_samples, int num_classes,
                                     double alpha)
    : num_classes_(num_classes), alpha_(alpha) {
  if (num_samples < 0 || num_classes < 1)
    Fail(ErrorKind::kConfig, "invalid moving-average dimensions");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    Fail(ErrorKind::kConfig, "momentum must lie in [0, 1]");
  initialized_.assign(num_samples, 0);
  average_.assign(static_cast<size_t>(num_samples) * num_classes, 0.0);
}

void SelfMovingAverage::CheckSample(int sample_id) const {
  if (sample_id < 0 || sample_id >= static_cast<int>(initialized_.size()))
    Fail(ErrorKind::kLookup, "unknown sample id " + std::to_string(sample_id));
}

bool SelfMovingAverage::Initialized(int sample_id) const {
  CheckSample(sample_id);
  return initialized_[sample_id] != 0;
}

void SelfMovingAverage::Update(int sample_id,
                               std::span<const double> probabilities) {
  CheckSample(sample_id);
  if (static_cast<int>(probabilities.size()) != num_classes_)
    Fail(ErrorKind::kShape, "prediction length mismatch in moving average");
  CheckFinite(probabilities);
  double* avg = average_.data() + static_cast<size_t>(sample_id) * num_classes_;
  if (!initialized_[sample_id]) {
    std::copy(probabilities.begin(), probabilities.end(), avg);
    initialized_[sample_id] = 1;
    return;
  }
  for (int j = 0; j < num_classes_; ++j)
    avg[j] = alpha_ * avg[j] + (1.0 - alpha_) * probabilities[j];
}

std::span<const double> SelfMovingAverage::Average(int sample_id) const {
  CheckSample(sample_id);
  if (!initialized_[sample_id])
    Fail(ErrorKind::kState, "moving average of sample " +
                                std::to_string(sample_id) + " not initialized");
  return {average_.data() + static_cast<size_t>(sample_id) * num_classes_,
          static_cast<size_t>(num_classes_)};
}

Decision SelfMovingAverage::Decide(int sample_id, int observed_label) const {
  return ArgMax(Average(sample_id)) == observed_label ? Decision::kClean
                                                      : Decision::kNoisy;
}

}  // namespace orgate
