// src/dataset.cpp

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

#include "orgate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "orgate/error.hpp"
#include "orgate/util.hpp"

namespace orgate {

namespace {

constexpr const char* kCorpusMagic = "orgate-corpus";
constexpr int kCorpusVersion = 1;

uint64_t PairKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

void CorpusConfig::Validate() const {
  if (num_speakers < 2)
    Fail(ErrorKind::kConfig, "num_speakers must be >= 2");
  if (utterances_per_speaker < 2)
    Fail(ErrorKind::kConfig, "utterances_per_speaker must be >= 2");
  if (feature_dim < 1) Fail(ErrorKind::kConfig, "feature_dim must be >= 1");
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation))
    Fail(ErrorKind::kConfig, "class_separation must be finite and >= 0");
  if (!(within_class_stddev > 0.0) || !std::isfinite(within_class_stddev))
    Fail(ErrorKind::kConfig, "within_class_stddev must be finite and > 0");
  if (speaker_dim < 0 || speaker_dim > feature_dim)
    Fail(ErrorKind::kConfig, "speaker_dim must lie in [0, feature_dim]");
}

const char* NoiseModeName(NoiseMode mode) {
  return mode == NoiseMode::kBernoulli ? "bernoulli" : "exact";
}

NoiseMode ParseNoiseMode(const std::string& name) {
  if (name == "bernoulli") return NoiseMode::kBernoulli;
  if (name == "exact") return NoiseMode::kExactCount;
  Fail(ErrorKind::kConfig, "unknown noise mode '" + name + "'");
}

int NoisyCorpus::NumCorrupted() const {
  return static_cast<int>(std::count_if(
      samples.begin(), samples.end(),
      [](const Sample& s) { return s.is_corrupted; }));
}

double NoisyCorpus::RealizedNoiseRate() const {
  if (samples.empty()) return 0.0;
  return static_cast<double>(NumCorrupted()) / samples.size();
}

NoisyCorpus GenerateCorpus(const CorpusConfig& config) {
  config.Validate();
  const int c = config.num_speakers;
  const int d = config.feature_dim;
  const int r = config.EffectiveSpeakerDim();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // E||mu_a - mu_b||^2 = 2 r sigma^2 = separation^2.
  const double mean_stddev = config.class_separation / std::sqrt(2.0 * r);
  std::vector<std::vector<double>> means(c, std::vector<double>(d, 0.0));
  for (auto& mean : means)
    for (int j = 0; j < r; ++j) mean[j] = mean_stddev * normal(rng);

  NoisyCorpus corpus;
  corpus.config = config;
  corpus.samples.reserve(static_cast<size_t>(c) * config.utterances_per_speaker);
  int id = 0;
  for (int speaker = 0; speaker < c; ++speaker) {
    for (int u = 0; u < config.utterances_per_speaker; ++u) {
      Sample s;
      s.id = id++;
      s.true_label = speaker;
      s.observed_label = speaker;
      s.features.resize(d);
      for (int j = 0; j < d; ++j)
        s.features[j] = means[speaker][j] +
                        config.within_class_stddev * normal(rng);
      corpus.samples.push_back(std::move(s));
    }
  }
  return corpus;
}

NoisyCorpus InjectSymmetricNoise(const NoisyCorpus& corpus, double eta,
                                 uint64_t seed, NoiseMode mode) {
  if (!(eta >= 0.0 && eta < 1.0))
    Fail(ErrorKind::kConfig, "noise rate must lie in [0, 1)");
  if (!corpus.IsClean())
    Fail(ErrorKind::kState, "corpus already carries injected noise");
  const int c = corpus.num_classes();
  if (c < 2) Fail(ErrorKind::kConfig, "symmetric noise needs >= 2 classes");

  NoisyCorpus out = corpus;
  out.noise_rate = eta;
  out.noise_seed = seed;
  out.noise_mode = mode;
  const int n = out.size();

  std::mt19937_64 rng(seed);
  std::vector<char> flip(n, 0);
  if (mode == NoiseMode::kBernoulli) {
    std::bernoulli_distribution coin(eta);
    for (int i = 0; i < n; ++i) flip[i] = coin(rng) ? 1 : 0;
  } else {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    // floor(eta n); the slack keeps e.g. 0.29 * 100 from landing on 28.
    const auto count = static_cast<int>(std::floor(eta * n + 1e-9));
    for (int i = 0; i < count; ++i) flip[order[i]] = 1;
  }

  std::uniform_int_distribution<int> wrong(0, c - 2);
  for (int i = 0; i < n; ++i) {
    if (!flip[i]) continue;
    Sample& s = out.samples[i];
    int label = wrong(rng);
    if (label >= s.true_label) ++label;  // skip the true label
    s.observed_label = label;
    s.is_corrupted = true;
  }
  return out;
}

TrialList MakeTrials(const NoisyCorpus& test_corpus, int num_target,
                     int num_nontarget, uint64_t seed) {
  if (num_target < 0 || num_nontarget < 0)
    Fail(ErrorKind::kConfig, "trial counts must be nonnegative");
  const int n = test_corpus.size();
  std::vector<std::vector<int>> by_speaker(test_corpus.num_classes());
  for (const Sample& s : test_corpus.samples) {
    if (s.true_label < 0 || s.true_label >= test_corpus.num_classes())
      Fail(ErrorKind::kInput, "test sample label out of range");
    by_speaker[s.true_label].push_back(s.id);
  }

  uint64_t total_target = 0;
  for (const auto& ids : by_speaker) {
    const uint64_t m = ids.size();
    if (m >= 2) total_target += m * (m - 1) / 2;
  }
  const uint64_t total_pairs = static_cast<uint64_t>(n) * (n - 1) / 2;
  const uint64_t total_nontarget = total_pairs - total_target;
  if (static_cast<uint64_t>(num_target) > total_target)
    Fail(ErrorKind::kConfig, "requested " + std::to_string(num_target) +
                                 " target trials but only " +
                                 std::to_string(total_target) + " exist");
  if (static_cast<uint64_t>(num_nontarget) > total_nontarget)
    Fail(ErrorKind::kConfig, "requested " + std::to_string(num_nontarget) +
                                 " nontarget trials but only " +
                                 std::to_string(total_nontarget) + " exist");

  std::mt19937_64 rng(seed);
  TrialList out;
  out.trials.reserve(static_cast<size_t>(num_target) + num_nontarget);
  const auto& samples = test_corpus.samples;

  auto sample_pairs = [&](bool target, int count, uint64_t total) {
    if (count == 0) return;
    if (static_cast<uint64_t>(count) * 2 > total) {
      // Dense request: enumerate and take a shuffled prefix.
      std::vector<Trial> all;
      all.reserve(total);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if ((samples[a].true_label == samples[b].true_label) == target)
            all.push_back({a, b, target});
      std::shuffle(all.begin(), all.end(), rng);
      out.trials.insert(out.trials.end(), all.begin(), all.begin() + count);
      return;
    }
    std::vector<int> eligible;
    for (const Sample& s : samples)
      if (!target || by_speaker[s.true_label].size() >= 2)
        eligible.push_back(s.id);
    std::uniform_int_distribution<size_t> pick(0, eligible.size() - 1);
    std::unordered_set<uint64_t> seen;
    while (static_cast<int>(seen.size()) < count) {
      const int a = eligible[pick(rng)];
      int b;
      if (target) {
        const auto& same = by_speaker[samples[a].true_label];
        std::uniform_int_distribution<size_t> pick_same(0, same.size() - 1);
        b = same[pick_same(rng)];
      } else {
        std::uniform_int_distribution<int> pick_any(0, n - 1);
        b = pick_any(rng);
        if (samples[b].true_label == samples[a].true_label) continue;
      }
      if (a == b) continue;
      if (seen.insert(PairKey(a, b)).second) out.trials.push_back({a, b, target});
    }
  };

  sample_pairs(true, num_target, total_target);
  sample_pairs(false, num_nontarget, total_nontarget);
  std::shuffle(out.trials.begin(), out.trials.end(), rng);
  return out;
}

std::string SerializeCorpus(const NoisyCorpus& corpus) {
  const CorpusConfig& cfg = corpus.config;
  std::string out;
  out += std::string(kCorpusMagic) + " " + std::to_string(kCorpusVersion) + "\n";
  out += "num_speakers " + std::to_string(cfg.num_speakers) + "\n";
  out += "utterances_per_speaker " + std::to_string(cfg.utterances_per_speaker) + "\n";
  out += "feature_dim " + std::to_string(cfg.feature_dim) + "\n";
  out += "class_separation " + FormatExact(cfg.class_separation) + "\n";
  out += "within_class_stddev " + FormatExact(cfg.within_class_stddev) + "\n";
  out += "speaker_dim " + std::to_string(cfg.speaker_dim) + "\n";
  out += "seed " + std::to_string(cfg.seed) + "\n";
  out += "noise_rate " + FormatExact(corpus.noise_rate) + "\n";
  out += "noise_seed " + std::to_string(corpus.noise_seed) + "\n";
  out += std::string("noise_mode ") + NoiseModeName(corpus.noise_mode) + "\n";
  out += "num_samples " + std::to_string(corpus.samples.size()) + "\n";
  out += "data\n";
  for (const Sample& s : corpus.samples) {
    out += std::to_string(s.id) + "," + std::to_string(s.true_label) + "," +
           std::to_string(s.observed_label) + "," +
           (s.is_corrupted ? "1" : "0") + ",";
    for (size_t j = 0; j < s.features.size(); ++j) {
      if (j) out += ' ';
      out += FormatExact(s.features[j]);
    }
    out += '\n';
  }
  out += "end\n";
  return out;
}

NoisyCorpus ParseCorpus(const std::string& text) {
  auto lines = Split(text, '\n');
  size_t pos = 0;
  auto next_line = [&](const char* what) -> std::string_view {
    if (pos >= lines.size())
      Fail(ErrorKind::kParse, std::string("unexpected end of file, expected ") + what);
    return lines[pos++];
  };
  auto header = [&](const char* key) -> std::string_view {
    std::string_view line = next_line(key);
    const std::string context = "line " + std::to_string(pos);
    auto fields = Split(line, ' ');
    if (fields.size() != 2 || fields[0] != key)
      Fail(ErrorKind::kParse, context + ": expected '" + key + " <value>'");
    return fields[1];
  };

  {
    std::string_view line = next_line("header");
    auto fields = Split(line, ' ');
    if (fields.size() != 2 || fields[0] != kCorpusMagic)
      Fail(ErrorKind::kFormat, "not an orgate corpus file");
    const int64_t version = ParseInt(fields[1], "line 1");
    if (version != kCorpusVersion)
      Fail(ErrorKind::kFormat, "unsupported corpus version " +
                                   std::to_string(version));
  }

  NoisyCorpus corpus;
  CorpusConfig& cfg = corpus.config;
  auto ctx = [&] { return "line " + std::to_string(pos); };
  cfg.num_speakers = static_cast<int>(ParseInt(header("num_speakers"), ctx()));
  cfg.utterances_per_speaker =
      static_cast<int>(ParseInt(header("utterances_per_speaker"), ctx()));
  cfg.feature_dim = static_cast<int>(ParseInt(header("feature_dim"), ctx()));
  cfg.class_separation = ParseDouble(header("class_separation"), ctx());
  cfg.within_class_stddev = ParseDouble(header("within_class_stddev"), ctx());
  cfg.speaker_dim = static_cast<int>(ParseInt(header("speaker_dim"), ctx()));
  cfg.seed = ParseUint(header("seed"), ctx());
  corpus.noise_rate = ParseDouble(header("noise_rate"), ctx());
  corpus.noise_seed = ParseUint(header("noise_seed"), ctx());
  try {
    corpus.noise_mode = ParseNoiseMode(std::string(header("noise_mode")));
  } catch (const Error& e) {
    Fail(ErrorKind::kParse, ctx() + ": " + e.what());
  }
  const int64_t num_samples = ParseInt(header("num_samples"), ctx());
  try {
    cfg.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kParse, std::string("invalid corpus header: ") + e.what());
  }
  if (num_samples < 0 ||
      num_samples != static_cast<int64_t>(cfg.num_speakers) * cfg.utterances_per_speaker)
    Fail(ErrorKind::kParse, ctx() + ": num_samples inconsistent with header");
  if (next_line("'data'") != "data")
    Fail(ErrorKind::kParse, ctx() + ": expected 'data'");

  const int c = cfg.num_speakers;
  corpus.samples.reserve(num_samples);
  for (int64_t i = 0; i < num_samples; ++i) {
    std::string_view line = next_line("sample record");
    const std::string context =
        "line " + std::to_string(pos) + " (record " + std::to_string(i) + ")";
    auto fields = Split(line, ',');
    if (fields.size() != 5)
      Fail(ErrorKind::kParse, context + ": expected 5 comma-separated fields");
    Sample s;
    s.id = static_cast<int>(ParseInt(fields[0], context));
    s.true_label = static_cast<int>(ParseInt(fields[1], context));
    s.observed_label = static_cast<int>(ParseInt(fields[2], context));
    const int64_t flag = ParseInt(fields[3], context);
    if (s.id != i) Fail(ErrorKind::kParse, context + ": sample ids must be 0..n-1 in order");
    if (s.true_label < 0 || s.true_label >= c || s.observed_label < 0 ||
        s.observed_label >= c)
      Fail(ErrorKind::kParse, context + ": label out of range [0, " +
                                  std::to_string(c) + ")");
    if (flag != 0 && flag != 1)
      Fail(ErrorKind::kParse, context + ": is_corrupted must be 0 or 1");
    s.is_corrupted = flag == 1;
    if (s.is_corrupted != (s.observed_label != s.true_label))
      Fail(ErrorKind::kParse, context + ": is_corrupted disagrees with labels");
    auto values = Split(fields[4], ' ');
    if (static_cast<int>(values.size()) != cfg.feature_dim)
      Fail(ErrorKind::kParse, context + ": expected " +
                                  std::to_string(cfg.feature_dim) + " features");
    s.features.reserve(values.size());
    for (auto v : values) s.features.push_back(ParseDouble(v, context));
    corpus.samples.push_back(std::move(s));
  }
  if (next_line("'end'") != "end")
    Fail(ErrorKind::kParse, ctx() + ": expected 'end' after " +
                                std::to_string(num_samples) + " records");
  return corpus;
}

void SaveCorpus(const NoisyCorpus& corpus, const std::string& path) {
  WriteTextFile(path, SerializeCorpus(corpus));
}

NoisyCorpus LoadCorpus(const std::string& path) {
  try {
    return ParseCorpus(ReadTextFile(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string SerializeTrials(const TrialList& trials) {
  std::string out;
  for (const Trial& t : trials.trials)
    out += std::to_string(t.sample_a) + "," + std::to_string(t.sample_b) + "," +
           (t.is_target ? "1" : "0") + "\n";
  return out;
}

TrialList ParseTrials(const std::string& text, int num_samples) {
  TrialList out;
  auto lines = Split(text, '\n');
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      if (i + 1 == lines.size()) break;
      Fail(ErrorKind::kParse, "line " + std::to_string(i + 1) + ": empty line");
    }
    const std::string context = "line " + std::to_string(i + 1);
    auto fields = Split(lines[i], ',');
    if (fields.size() != 3)
      Fail(ErrorKind::kParse, context + ": expected sample_id_a,sample_id_b,is_target");
    Trial t;
    t.sample_a = static_cast<int>(ParseInt(fields[0], context));
    t.sample_b = static_cast<int>(ParseInt(fields[1], context));
    const int64_t flag = ParseInt(fields[2], context);
    if (flag != 0 && flag != 1)
      Fail(ErrorKind::kParse, context + ": is_target must be 0 or 1");
    t.is_target = flag == 1;
    if (t.sample_a < 0 || t.sample_b < 0 ||
        (num_samples >= 0 && (t.sample_a >= num_samples || t.sample_b >= num_samples)))
      Fail(ErrorKind::kParse, context + ": sample id out of range");
    if (t.sample_a == t.sample_b)
      Fail(ErrorKind::kParse, context + ": trial pairs a sample with itself");
    out.trials.push_back(t);
  }
  return out;
}

void SaveTrials(const TrialList& trials, const std::string& path) {
  WriteTextFile(path, SerializeTrials(trials));
}

TrialList LoadTrials(const std::string& path, int num_samples) {
  try {
    return ParseTrials(ReadTextFile(path), num_samples);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace orgate
