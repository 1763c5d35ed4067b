// include/orgate/eval.hpp

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

#ifndef ORGATE_EVAL_HPP_
#define ORGATE_EVAL_HPP_

#include <optional>
#include <span>
#include <vector>

#include "orgate/dataset.hpp"
#include "orgate/model.hpp"
#include "orgate/selector.hpp"

namespace orgate {

struct ScoredTrial {
  double score = 0.0;
  bool is_target = false;
};

using ScoredTrials = std::vector<ScoredTrial>;

/// Cosine score of every trial, in trial order.
ScoredTrials ScoreTrials(const Model& model, const NoisyCorpus& test_corpus,
                         const TrialList& trials);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/**
   Equal error rate of a scored trial set.

   A trial is accepted when its score is >= the threshold. Sweeping the
   threshold over the distinct scores (plus one point above the maximum)
   traces the operating points (FAR, FRR); FRR - FAR is nondecreasing along
   the sweep. The EER is taken at the first point where FRR >= FAR; if the
   two rates cross strictly between that point and its predecessor, both the
   rate and the threshold are linearly interpolated along the segment.
   Throws kInput unless there is at least one target and one nontarget.
*/
EerResult ComputeEer(std::span<const ScoredTrial> scored);

struct SelectionReport {
  int num_selected = 0;
  int num_selected_clean = 0;
  int num_clean_total = 0;
  std::optional<double> precision;  // absent when nothing is selected
  std::optional<double> recall;     // absent when the corpus has no clean label
};

SelectionReport SelectionMetrics(std::span<const Decision> decisions,
                                 const NoisyCorpus& corpus);

}  // namespace orgate

#endif  // ORGATE_EVAL_HPP_
