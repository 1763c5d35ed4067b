// src/eval.cpp

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

#include "orgate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <string>

#include "orgate/error.hpp"

namespace orgate {

ScoredTrials ScoreTrials(const Model& model, const NoisyCorpus& test_corpus,
                         const TrialList& trials) {
  const int n = test_corpus.size();
  for (const Trial& t : trials.trials)
    if (t.sample_a < 0 || t.sample_a >= n || t.sample_b < 0 || t.sample_b >= n)
      Fail(ErrorKind::kLookup, "trial references unknown sample (" +
                                   std::to_string(t.sample_a) + ", " +
                                   std::to_string(t.sample_b) + ")");

  Eigen::MatrixXd inputs(test_corpus.config.feature_dim, n);
  for (int i = 0; i < n; ++i) {
    const auto& f = test_corpus.samples[i].features;
    if (static_cast<int>(f.size()) != inputs.rows())
      Fail(ErrorKind::kShape, "test sample has wrong feature dimension");
    inputs.col(i) = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
  }
  const Eigen::MatrixXd emb = model.EmbedBatch(inputs);

  ScoredTrials out;
  out.reserve(trials.trials.size());
  const auto dim = static_cast<size_t>(emb.rows());
  for (const Trial& t : trials.trials) {
    std::span<const double> a(emb.col(t.sample_a).data(), dim);
    std::span<const double> b(emb.col(t.sample_b).data(), dim);
    out.push_back({CosineScore(a, b), t.is_target});
  }
  return out;
}

EerResult ComputeEer(std::span<const ScoredTrial> scored) {
  std::vector<double> target, nontarget;
  for (const ScoredTrial& s : scored) {
    if (!std::isfinite(s.score)) Fail(ErrorKind::kInput, "non-finite trial score");
    (s.is_target ? target : nontarget).push_back(s.score);
  }
  if (target.empty() || nontarget.empty())
    Fail(ErrorKind::kInput, "EER needs at least one target and one nontarget trial");
  std::sort(target.begin(), target.end());
  std::sort(nontarget.begin(), nontarget.end());

  std::vector<double> thresholds;
  thresholds.reserve(target.size() + nontarget.size() + 1);
  std::merge(target.begin(), target.end(), nontarget.begin(), nontarget.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(std::nextafter(thresholds.back(),
                                      std::numeric_limits<double>::infinity()));

  const double nt = static_cast<double>(target.size());
  const double nn = static_cast<double>(nontarget.size());
  size_t ti = 0, ni = 0;  // counts of scores below the current threshold
  double prev_far = 1.0, prev_frr = 0.0, prev_thr = thresholds.front();
  for (size_t i = 0; i < thresholds.size(); ++i) {
    const double thr = thresholds[i];
    while (ti < target.size() && target[ti] < thr) ++ti;
    while (ni < nontarget.size() && nontarget[ni] < thr) ++ni;
    const double frr = ti / nt;
    const double far = (nn - ni) / nn;
    const double diff = frr - far;
    if (diff >= 0.0) {
      if (diff == 0.0) return {frr, thr};
      const double prev_diff = prev_frr - prev_far;  // < 0
      const double lambda = -prev_diff / (diff - prev_diff);
      return {prev_frr + lambda * (frr - prev_frr),
              prev_thr + lambda * (thr - prev_thr)};
    }
    prev_far = far;
    prev_frr = frr;
    prev_thr = thr;
  }
  // The last threshold rejects everything, so FRR = 1 >= FAR = 0 there.
  Fail(ErrorKind::kNumeric, "EER sweep did not cross");
}

SelectionReport SelectionMetrics(std::span<const Decision> decisions,
                                 const NoisyCorpus& corpus) {
  if (static_cast<int>(decisions.size()) != corpus.size())
    Fail(ErrorKind::kInput, "decision count " + std::to_string(decisions.size()) +
                                " != corpus size " + std::to_string(corpus.size()));
  SelectionReport r;
  for (size_t i = 0; i < decisions.size(); ++i) {
    const Sample& s = corpus.samples[i];
    const bool clean = s.observed_label == s.true_label;
    const bool selected = decisions[i] == Decision::kClean;
    r.num_clean_total += clean;
    r.num_selected += selected;
    r.num_selected_clean += clean && selected;
  }
  if (r.num_selected > 0)
    r.precision = static_cast<double>(r.num_selected_clean) / r.num_selected;
  if (r.num_clean_total > 0)
    r.recall = static_cast<double>(r.num_selected_clean) / r.num_clean_total;
  return r;
}

}  // namespace orgate
