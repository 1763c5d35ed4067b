// tests/test_dataset.cpp

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

#include <cmath>
#include <set>
#include <string>

#include "orgate/dataset.hpp"
#include "orgate/error.hpp"
#include "test_util.hpp"

using namespace orgate;

namespace {

CorpusConfig SmallConfig(int c, int u, uint64_t seed = 3) {
  CorpusConfig cfg;
  cfg.num_speakers = c;
  cfg.utterances_per_speaker = u;
  cfg.feature_dim = 4;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("generate: counts and speaker order") {
  const NoisyCorpus corpus = GenerateCorpus(SmallConfig(2, 2));
  REQUIRE(corpus.samples.size() == 4);
  const int expected[] = {0, 0, 1, 1};
  for (int i = 0; i < 4; ++i) {
    CHECK(corpus.samples[i].id == i);
    CHECK(corpus.samples[i].true_label == expected[i]);
    CHECK(corpus.samples[i].observed_label == expected[i]);
    CHECK_FALSE(corpus.samples[i].is_corrupted);
    CHECK(corpus.samples[i].features.size() == 4);
  }
  CHECK(corpus.IsClean());
}

TEST_CASE("generate: deterministic under seed") {
  CHECK(GenerateCorpus(SmallConfig(5, 7)) == GenerateCorpus(SmallConfig(5, 7)));
  CHECK_FALSE(GenerateCorpus(SmallConfig(5, 7, 1)) == GenerateCorpus(SmallConfig(5, 7, 2)));
}

TEST_CASE("generate: invalid configs") {
  auto fails = [](CorpusConfig cfg) {
    CHECK(ErrorKindOf([&] { GenerateCorpus(cfg); }) == ErrorKind::kConfig);
  };
  CorpusConfig cfg = SmallConfig(5, 5);
  cfg.num_speakers = 1;
  fails(cfg);
  cfg = SmallConfig(5, 1);
  fails(cfg);
  cfg = SmallConfig(5, 5);
  cfg.feature_dim = 0;
  fails(cfg);
  cfg = SmallConfig(5, 5);
  cfg.within_class_stddev = 0.0;
  fails(cfg);
  cfg = SmallConfig(5, 5);
  cfg.class_separation = -1.0;
  fails(cfg);
  cfg = SmallConfig(5, 5);
  cfg.speaker_dim = 5;
  fails(cfg);
}

TEST_CASE("generate: nearest class mean classifies perfectly when well separated") {
  CorpusConfig cfg = SmallConfig(5, 40);
  cfg.feature_dim = 8;
  cfg.class_separation = 10.0;
  cfg.within_class_stddev = 0.1;
  const NoisyCorpus corpus = GenerateCorpus(cfg);
  // Class means estimated from the data, then brute-force assignment.
  std::vector<std::vector<double>> means(5, std::vector<double>(8, 0.0));
  for (const Sample& s : corpus.samples)
    for (int j = 0; j < 8; ++j) means[s.true_label][j] += s.features[j] / 40.0;
  int correct = 0;
  for (const Sample& s : corpus.samples) {
    int best = -1;
    double best_d = 0.0;
    for (int c = 0; c < 5; ++c) {
      double d = 0.0;
      for (int j = 0; j < 8; ++j) d += (s.features[j] - means[c][j]) * (s.features[j] - means[c][j]);
      if (best < 0 || d < best_d) best = c, best_d = d;
    }
    correct += best == s.true_label;
  }
  CHECK(correct == 200);
}

TEST_CASE("generate: speaker subspace leaves the other coordinates pure noise") {
  CorpusConfig cfg = SmallConfig(10, 200);
  cfg.feature_dim = 6;
  cfg.speaker_dim = 2;
  cfg.class_separation = 20.0;
  const NoisyCorpus corpus = GenerateCorpus(cfg);
  // Per-class sample means of the nuisance coordinates stay near zero.
  for (int c = 0; c < 10; ++c) {
    for (int j = 2; j < 6; ++j) {
      double m = 0.0;
      for (int u = 0; u < 200; ++u) m += corpus.samples[c * 200 + u].features[j];
      CHECK(std::abs(m / 200.0) < 5.0 / std::sqrt(200.0));
    }
  }
}

TEST_CASE("noise: eta 0 is the identity") {
  const NoisyCorpus clean = GenerateCorpus(SmallConfig(4, 10));
  const NoisyCorpus out = InjectSymmetricNoise(clean, 0.0, 9);
  CHECK(out.samples == clean.samples);
  CHECK(out.NumCorrupted() == 0);
}

TEST_CASE("noise: two classes flip to the other label") {
  const NoisyCorpus clean = GenerateCorpus(SmallConfig(2, 1000));
  const NoisyCorpus out = InjectSymmetricNoise(clean, 0.5, 11);
  const double n = 2000.0;
  const int flips = out.NumCorrupted();
  CHECK(std::abs(flips - 0.5 * n) <= 3.0 * std::sqrt(n * 0.25));
  for (const Sample& s : out.samples) {
    CHECK(s.is_corrupted == (s.observed_label != s.true_label));
    if (s.is_corrupted) CHECK(s.observed_label == 1 - s.true_label);
  }
  CHECK(out.RealizedNoiseRate() == doctest::Approx(flips / n));
}

TEST_CASE("noise: wrong labels are uniform over the other classes") {
  const int c = 10;
  const NoisyCorpus clean = GenerateCorpus(SmallConfig(c, 1000));
  const NoisyCorpus out = InjectSymmetricNoise(clean, 0.3, 5);
  const double n = 10000.0;
  const int flips = out.NumCorrupted();
  CHECK(std::abs(flips - 0.3 * n) <= 4.0 * std::sqrt(n * 0.3 * 0.7));
  // Offset (observed - true) mod c is uniform over 1..c-1 under the law.
  std::vector<int> counts(c, 0);
  for (const Sample& s : out.samples) {
    CHECK(s.true_label == clean.samples[s.id].true_label);
    CHECK(s.is_corrupted == (s.observed_label != s.true_label));
    if (s.is_corrupted) ++counts[(s.observed_label - s.true_label + c) % c];
  }
  CHECK(counts[0] == 0);
  double chi2 = 0.0;
  for (int j = 1; j < c; ++j) {
    const double expected = flips / double(c - 1);
    chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
  }
  // chi-square(8) upper 1% point.
  CHECK(chi2 < 20.090);
}

TEST_CASE("noise: exact-count mode flips floor(eta n) samples") {
  const NoisyCorpus clean = GenerateCorpus(SmallConfig(5, 31));
  const NoisyCorpus out = InjectSymmetricNoise(clean, 0.3, 5, NoiseMode::kExactCount);
  CHECK(out.NumCorrupted() == static_cast<int>(std::floor(0.3 * 155)));
  CHECK(out.noise_mode == NoiseMode::kExactCount);
}

TEST_CASE("noise: deterministic and validated") {
  const NoisyCorpus clean = GenerateCorpus(SmallConfig(4, 50));
  CHECK(InjectSymmetricNoise(clean, 0.2, 1) == InjectSymmetricNoise(clean, 0.2, 1));
  CHECK(ErrorKindOf([&] { InjectSymmetricNoise(clean, 1.0, 1); }) == ErrorKind::kConfig);
  CHECK(ErrorKindOf([&] { InjectSymmetricNoise(clean, -0.1, 1); }) == ErrorKind::kConfig);
  const NoisyCorpus noisy = InjectSymmetricNoise(clean, 0.5, 1);
  REQUIRE(noisy.NumCorrupted() > 0);
  CHECK(ErrorKindOf([&] { InjectSymmetricNoise(noisy, 0.1, 1); }) == ErrorKind::kState);
}

TEST_CASE("trials: tiny corpus gets the only valid target pairs") {
  const NoisyCorpus test = GenerateCorpus(SmallConfig(2, 2));
  const TrialList trials = MakeTrials(test, 2, 0, 1);
  REQUIRE(trials.trials.size() == 2);
  std::set<std::pair<int, int>> pairs;
  for (const Trial& t : trials.trials) {
    CHECK(t.is_target);
    CHECK(t.sample_a != t.sample_b);
    CHECK(test.samples[t.sample_a].true_label == test.samples[t.sample_b].true_label);
    pairs.insert(std::minmax(t.sample_a, t.sample_b));
  }
  CHECK(pairs == std::set<std::pair<int, int>>{{0, 1}, {2, 3}});
  CHECK(MakeTrials(test, 0, 0, 1).trials.empty());
  CHECK(ErrorKindOf([&] { MakeTrials(test, 3, 0, 1); }) == ErrorKind::kConfig);
  CHECK(ErrorKindOf([&] { MakeTrials(test, 0, 5, 1); }) == ErrorKind::kConfig);
}

TEST_CASE("trials: exhaustive label check") {
  const NoisyCorpus test = GenerateCorpus(SmallConfig(10, 10));
  const TrialList trials = MakeTrials(test, 400, 500, 4);
  int targets = 0;
  std::set<std::pair<int, int>> seen;
  for (const Trial& t : trials.trials) {
    CHECK(t.sample_a != t.sample_b);
    const bool same = test.samples[t.sample_a].true_label == test.samples[t.sample_b].true_label;
    CHECK(same == t.is_target);
    targets += t.is_target;
    CHECK(seen.insert(std::minmax(t.sample_a, t.sample_b)).second);
  }
  CHECK(targets == 400);
  CHECK(trials.trials.size() == 900);
  CHECK(MakeTrials(test, 400, 500, 4) == trials);
}

TEST_CASE("corpus files round-trip exactly") {
  TempDir dir;
  const NoisyCorpus corpus =
      InjectSymmetricNoise(GenerateCorpus(SmallConfig(3, 5)), 0.4, 8, NoiseMode::kExactCount);
  const std::string path = dir.path("c.corpus");
  SaveCorpus(corpus, path);
  const NoisyCorpus loaded = LoadCorpus(path);
  CHECK(loaded == corpus);
  CHECK(SerializeCorpus(loaded) == SerializeCorpus(corpus));

  const TrialList trials = MakeTrials(corpus, 5, 5, 2);
  SaveTrials(trials, dir.path("t.txt"));
  CHECK(LoadTrials(dir.path("t.txt"), 15) == trials);
}

TEST_CASE("corpus parse errors") {
  const NoisyCorpus corpus = GenerateCorpus(SmallConfig(3, 2));
  const std::string text = SerializeCorpus(corpus);

  SUBCASE("label out of range") {
    std::string bad = text;
    const auto pos = bad.find("\n0,0,0,0,");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 9, "\n0,0,3,1,");
    const auto kind = ErrorKindOf([&] { ParseCorpus(bad); });
    CHECK(kind == ErrorKind::kParse);
    CHECK(ErrorMessageOf([&] { ParseCorpus(bad); }).find("record 0") != std::string::npos);
  }
  SUBCASE("truncated") {
    const std::string cut = text.substr(0, text.size() / 2);
    CHECK(ErrorKindOf([&] { ParseCorpus(cut); }) == ErrorKind::kParse);
    const std::string no_end = text.substr(0, text.rfind("end"));
    CHECK(ErrorKindOf([&] { ParseCorpus(no_end); }) == ErrorKind::kParse);
  }
  SUBCASE("version mismatch") {
    std::string bad = text;
    bad.replace(0, bad.find('\n'), "orgate-corpus 99");
    CHECK(ErrorKindOf([&] { ParseCorpus(bad); }) == ErrorKind::kFormat);
    CHECK(ErrorKindOf([&] { ParseCorpus("hello\n"); }) == ErrorKind::kFormat);
  }
  SUBCASE("flag inconsistent with labels") {
    std::string bad = text;
    const auto pos = bad.find("\n0,0,0,0,");
    bad.replace(pos, 9, "\n0,0,0,1,");
    CHECK(ErrorKindOf([&] { ParseCorpus(bad); }) == ErrorKind::kParse);
  }
  SUBCASE("trial ids out of range") {
    CHECK(ErrorKindOf([&] { ParseTrials("0,9,1\n", 6); }) == ErrorKind::kParse);
    CHECK(ErrorKindOf([&] { ParseTrials("0,1\n", 6); }) == ErrorKind::kParse);
    CHECK(ErrorKindOf([&] { ParseTrials("2,2,1\n", 6); }) == ErrorKind::kParse);
  }
  SUBCASE("missing file") {
    CHECK(ErrorKindOf([&] { LoadCorpus("/nonexistent/x.corpus"); }) == ErrorKind::kIo);
  }
}
