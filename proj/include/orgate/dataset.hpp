// include/orgate/dataset.hpp

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

#ifndef ORGATE_DATASET_HPP_
#define ORGATE_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace orgate {

/// Parameters of the synthetic speaker corpus. Every speaker's utterances
/// are isotropic Gaussian draws around a per-speaker mean; the means
/// themselves are Gaussian with a spread chosen so that the RMS distance
/// between two means equals `class_separation`.
struct CorpusConfig {
  int num_speakers = 50;
  int utterances_per_speaker = 100;
  int feature_dim = 32;
  double class_separation = 4.0;
  double within_class_stddev = 1.0;
  // Class means vary only in the first speaker_dim coordinates; the rest
  // carry within-class noise alone. 0 means all of feature_dim.
  int speaker_dim = 0;
  uint64_t seed = 1;

  int EffectiveSpeakerDim() const {
    return speaker_dim == 0 ? feature_dim : speaker_dim;
  }

  void Validate() const;
  bool operator==(const CorpusConfig&) const = default;
};

struct Sample {
  int id = 0;
  std::vector<double> features;
  int true_label = 0;
  int observed_label = 0;
  bool is_corrupted = false;

  bool operator==(const Sample&) const = default;
};

enum class NoiseMode {
  kBernoulli,   // each sample flipped independently with probability eta
  kExactCount,  // exactly round(eta * n) samples flipped
};

const char* NoiseModeName(NoiseMode mode);
NoiseMode ParseNoiseMode(const std::string& name);

struct NoisyCorpus {
  CorpusConfig config;
  std::vector<Sample> samples;
  double noise_rate = 0.0;  // requested eta
  uint64_t noise_seed = 0;
  NoiseMode noise_mode = NoiseMode::kBernoulli;

  int num_classes() const { return config.num_speakers; }
  int size() const { return static_cast<int>(samples.size()); }
  int NumCorrupted() const;
  /// Fraction of samples whose observed label differs from the truth.
  double RealizedNoiseRate() const;
  bool IsClean() const { return NumCorrupted() == 0; }

  bool operator==(const NoisyCorpus&) const = default;
};

struct Trial {
  int sample_a = 0;
  int sample_b = 0;
  bool is_target = false;

  bool operator==(const Trial&) const = default;
};

struct TrialList {
  std::vector<Trial> trials;
  bool operator==(const TrialList&) const = default;
};

NoisyCorpus GenerateCorpus(const CorpusConfig& config);

/// Symmetric label noise: a flipped sample gets a label drawn uniformly from
/// the c-1 wrong classes, so each wrong class has overall probability
/// eta/(c-1). Requires a clean corpus and 0 <= eta < 1.
NoisyCorpus InjectSymmetricNoise(const NoisyCorpus& corpus, double eta,
                                 uint64_t seed,
                                 NoiseMode mode = NoiseMode::kBernoulli);

/// Samples distinct unordered pairs (no self pairs, no repeated pair).
/// Throws kConfig when more pairs are requested than exist.
TrialList MakeTrials(const NoisyCorpus& test_corpus, int num_target,
                     int num_nontarget, uint64_t seed);

std::string SerializeCorpus(const NoisyCorpus& corpus);
NoisyCorpus ParseCorpus(const std::string& text);
void SaveCorpus(const NoisyCorpus& corpus, const std::string& path);
NoisyCorpus LoadCorpus(const std::string& path);

std::string SerializeTrials(const TrialList& trials);
/// `num_samples` bounds the ids when >= 0.
TrialList ParseTrials(const std::string& text, int num_samples = -1);
void SaveTrials(const TrialList& trials, const std::string& path);
TrialList LoadTrials(const std::string& path, int num_samples = -1);

}  // namespace orgate

#endif  // ORGATE_DATASET_HPP_
