// tests/test_selector.cpp

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
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "orgate/error.hpp"
#include "orgate/selector.hpp"
#include "test_util.hpp"

using namespace orgate;

namespace {

// Top-k by full sort on (-p, index); independent of the library's
// partial-selection code path.
std::vector<int> TopKOracle(const std::vector<double>& p, int k) {
  std::vector<int> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return p[a] != p[b] ? p[a] > p[b] : a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<double> RandomProbs(std::mt19937_64& rng, int c, bool with_ties) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 3);
  std::vector<double> p(c);
  double sum = 0.0;
  for (double& v : p) {
    v = with_ties ? 0.25 * (level(rng) + 1) : u(rng);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

TEST_CASE("top-k examples") {
  const std::vector<double> p = {0.1, 0.7, 0.2};
  CHECK(TopKLabels(p, 1) == std::vector<int>{1});
  CHECK(TopKLabels(p, 3) == std::vector<int>{0, 1, 2});
  const std::vector<double> tie = {0.4, 0.4, 0.2};
  CHECK(TopKLabels(tie, 2) == std::vector<int>{0, 1});
  CHECK(TopKLabels(tie, 1) == std::vector<int>{0});
  const std::vector<double> tie2 = {0.2, 0.4, 0.4};
  CHECK(TopKLabels(tie2, 1) == std::vector<int>{1});
}

TEST_CASE("top-k errors") {
  const std::vector<double> p = {0.1, 0.7, 0.2};
  CHECK(ErrorKindOf([&] { TopKLabels(p, 0); }) == ErrorKind::kConfig);
  CHECK(ErrorKindOf([&] { TopKLabels(p, 4); }) == ErrorKind::kConfig);
  const std::vector<double> nan = {0.1, std::nan(""), 0.2};
  CHECK(ErrorKindOf([&] { TopKLabels(nan, 1); }) == ErrorKind::kNumeric);
  CHECK(ErrorKindOf([&] { ArgMax(nan); }) == ErrorKind::kNumeric);
}

TEST_CASE("top-k agrees with a sort-based oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const int c = 1 + static_cast<int>(rng() % 20);
    const int k = 1 + static_cast<int>(rng() % c);
    const auto p = RandomProbs(rng, c, trial % 2 == 0);
    REQUIRE(TopKLabels(p, k) == TopKOracle(p, k));
  }
}

TEST_CASE("record epoch is append-only") {
  PredictionStore store(3, 1, {0, 1}, true);
  const std::vector<double> p = {0.6, 0.3, 0.1};
  store.RecordEpoch(0, p, 0);
  CHECK(store.History(0).size() == 1);
  CHECK(store.EpochsRecorded(0) == 1);
  CHECK(store.num_epochs_recorded() == 0);
  CHECK(ErrorKindOf([&] { store.RecordEpoch(0, p, 0); }) == ErrorKind::kState);
  CHECK(ErrorKindOf([&] { store.RecordEpoch(1, p, 1); }) == ErrorKind::kState);
  CHECK(ErrorKindOf([&] { store.RecordEpoch(5, p, 0); }) == ErrorKind::kLookup);
  const std::vector<double> short_p = {0.5, 0.5};
  CHECK(ErrorKindOf([&] { store.RecordEpoch(1, short_p, 0); }) == ErrorKind::kShape);
}

TEST_CASE("recorded history equals offline top-k") {
  std::mt19937_64 rng(3);
  PredictionStore store(6, 2, {4}, true);
  std::vector<std::vector<int>> expected;
  for (int e = 0; e < 5; ++e) {
    const auto p = RandomProbs(rng, 6, e % 2 == 1);
    store.RecordEpoch(0, p, e);
    expected.push_back(TopKOracle(p, 2));
  }
  const auto& h = store.History(0);
  REQUIRE(h.size() == 5);
  for (int e = 0; e < 5; ++e) {
    CHECK(h[e].epoch == e);
    CHECK(h[e].labels == expected[e]);
  }
}

TEST_CASE("or-gate examples") {
  // label 0; top-1 sets {1}, {0}, {2} -> miss, hit, miss.
  const std::vector<std::vector<double>> preds = {
      {0.2, 0.7, 0.1}, {0.8, 0.1, 0.1}, {0.1, 0.1, 0.8}};
  for (bool retain : {false, true}) {
    CAPTURE(retain);
    PredictionStore store(3, 1, {0, 0}, retain);
    CHECK(store.OrGateDecision(0, 0, 0) == Decision::kNoisy);  // empty history
    for (int e = 0; e < 3; ++e) store.RecordEpoch(0, preds[e], e);
    CHECK(store.OrGateDecision(0, 0, 1) == Decision::kNoisy);
    CHECK(store.OrGateDecision(0, 0, 2) == Decision::kClean);
    CHECK(store.OrGateDecision(0, 0, 3) == Decision::kClean);
    CHECK(store.FirstMatchEpoch(0) == 1);

    // miss, miss, miss
    for (int e = 0; e < 3; ++e) store.RecordEpoch(1, preds[e == 1 ? 0 : e], e);
    CHECK(store.OrGateDecision(1, 0, 3) == Decision::kNoisy);
    CHECK_FALSE(store.MatchedEver(1));

    CHECK(ErrorKindOf([&] { store.OrGateDecision(7, 0, 1); }) == ErrorKind::kLookup);
    CHECK(ErrorKindOf([&] { store.OrGateDecision(0, 0, 4); }) == ErrorKind::kState);
  }
}

TEST_CASE("or-gate: oracle, compression and monotonicity on random histories") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int c = 2 + static_cast<int>(rng() % 19);
    const int k = 1 + static_cast<int>(rng() % c);
    const int epochs = 1 + static_cast<int>(rng() % 30);
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<int> labels(n);
    for (int& y : labels) y = static_cast<int>(rng() % c);
    PredictionStore full(c, k, labels, true);
    PredictionStore compact(c, k, labels, false);
    std::vector<std::vector<std::vector<int>>> sets(n);
    for (int e = 0; e < epochs; ++e) {
      for (int t = 0; t < n; ++t) {
        const auto p = RandomProbs(rng, c, rng() % 2 == 0);
        full.RecordEpoch(t, p, e);
        compact.RecordEpoch(t, p, e);
        sets[t].push_back(TopKOracle(p, k));
      }
    }
    for (int t = 0; t < n; ++t) {
      bool was_clean = false;
      for (int i = 0; i <= epochs; ++i) {
        bool any = false;
        for (int j = 0; j < i; ++j)
          any = any || std::count(sets[t][j].begin(), sets[t][j].end(), labels[t]) > 0;
        const Decision expect = any ? Decision::kClean : Decision::kNoisy;
        REQUIRE(full.OrGateDecision(t, labels[t], i) == expect);
        REQUIRE(compact.OrGateDecision(t, labels[t], i) == expect);
        if (was_clean) REQUIRE(expect == Decision::kClean);
        was_clean = any;
        if (k == c && i >= 1) REQUIRE(expect == Decision::kClean);
      }
      // Full history also answers for labels other than the registered one.
      const int other = (labels[t] + 1) % c;
      bool any_other = false;
      for (int j = 0; j < epochs; ++j)
        any_other = any_other || std::count(sets[t][j].begin(), sets[t][j].end(), other) > 0;
      REQUIRE(full.OrGateDecision(t, other, epochs) ==
              (any_other ? Decision::kClean : Decision::kNoisy));
    }
  }
}

TEST_CASE("diagnostic dump") {
  PredictionStore store(3, 1, {0, 2}, false);
  const std::vector<double> a = {0.7, 0.2, 0.1};
  const std::vector<double> b = {0.1, 0.2, 0.7};
  store.RecordEpoch(0, b, 0);
  store.RecordEpoch(1, a, 0);
  store.RecordEpoch(0, a, 1);
  store.RecordEpoch(1, b, 1);
  std::ostringstream e0, e1;
  store.DumpEpoch(0, e0);
  store.DumpEpoch(1, e1);
  CHECK(e0.str() == "0,0,0,-1\n1,0,0,-1\n");
  CHECK(e1.str() == "0,1,1,1\n1,1,1,1\n");
}

TEST_CASE("self moving average arithmetic") {
  const std::vector<double> p0 = {1.0, 0.0};
  const std::vector<double> p1 = {0.0, 1.0};

  SelfMovingAverage half(1, 2, 0.5);
  CHECK_FALSE(half.Initialized(0));
  CHECK(ErrorKindOf([&] { half.Decide(0, 0); }) == ErrorKind::kState);
  half.Update(0, p0);
  half.Update(0, p1);
  CHECK(half.Average(0)[0] == 0.5);
  CHECK(half.Average(0)[1] == 0.5);
  CHECK(half.Decide(0, 0) == Decision::kClean);  // tie to index 0
  CHECK(half.Decide(0, 1) == Decision::kNoisy);

  SelfMovingAverage zero(1, 2, 0.0);
  zero.Update(0, p0);
  zero.Update(0, p1);
  CHECK(zero.Average(0)[1] == 1.0);

  SelfMovingAverage one(1, 2, 1.0);
  one.Update(0, p0);
  one.Update(0, p1);
  CHECK(one.Average(0)[0] == 1.0);
  CHECK(one.Decide(0, 0) == Decision::kClean);

  const std::vector<double> bad = {1.0};
  CHECK(ErrorKindOf([&] { one.Update(0, bad); }) == ErrorKind::kShape);
  CHECK(ErrorKindOf([&] { SelfMovingAverage(1, 2, 1.5); }) == ErrorKind::kConfig);
}

TEST_CASE("self decision examples") {
  SelfMovingAverage ma(1, 2, 0.9);
  const std::vector<double> p = {0.9, 0.1};
  ma.Update(0, p);
  CHECK(ma.Decide(0, 0) == Decision::kClean);
  CHECK(ma.Decide(0, 1) == Decision::kNoisy);
}

TEST_CASE("self average stays a probability vector") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 2 + static_cast<int>(rng() % 10);
    const double alpha = u(rng);
    SelfMovingAverage ma(1, c, alpha);
    std::vector<double> expect;
    for (int step = 0; step < 20; ++step) {
      const auto p = RandomProbs(rng, c, false);
      ma.Update(0, p);
      if (step == 0) {
        expect = p;
      } else {
        for (int j = 0; j < c; ++j) expect[j] = alpha * expect[j] + (1.0 - alpha) * p[j];
      }
      double sum = 0.0;
      for (int j = 0; j < c; ++j) {
        REQUIRE(ma.Average(0)[j] >= 0.0);
        REQUIRE(std::abs(ma.Average(0)[j] - expect[j]) <= 1e-12);
        sum += ma.Average(0)[j];
      }
      REQUIRE(std::abs(sum - 1.0) <= 1e-6);
    }
  }
}
