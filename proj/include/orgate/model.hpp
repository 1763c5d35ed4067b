// include/orgate/model.hpp

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

#ifndef ORGATE_MODEL_HPP_
#define ORGATE_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace orgate {

enum class Activation { kTanh, kLinear };

const char* ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

struct ModelConfig {
  int feature_dim = 32;
  std::vector<int> hidden_dims = {128, 128};
  int embedding_dim = 64;
  int num_classes = 50;
  double margin = 0.2;
  double scale = 30.0;
  Activation activation = Activation::kTanh;
  uint64_t seed = 1;

  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct OptimizerConfig {
  double initial_lr = 2e-4;
  double lr_decay_factor = 0.4;
  int decay_interval_epochs = 5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

/// Step schedule: initial_lr * decay^floor(epoch / interval).
double LearningRateAtEpoch(const OptimizerConfig& config, int epoch);

// ---------------------------------------------------------------------------
// Additive-margin softmax head.
//
// With e the embedding, w_j the rows of the class-weight matrix and
// cos_j = <w_j/|w_j|, e/|e|>, the logits are s*(cos_j - m*[j == y]) and the
// loss is the cross entropy of their softmax at the label y.

struct AmSoftmaxOutput {
  double loss = 0.0;
  Eigen::VectorXd probabilities;  // softmax of the margin logits
  Eigen::VectorXd posteriors;     // softmax of s*cos, label independent
  Eigen::VectorXd cosines;
};

struct AmSoftmaxGradients {
  Eigen::VectorXd embedding;
  Eigen::MatrixXd class_weights;
};

AmSoftmaxOutput AmSoftmaxForward(const Eigen::MatrixXd& class_weights,
                                 const Eigen::VectorXd& embedding, int label,
                                 double scale, double margin);

AmSoftmaxGradients AmSoftmaxBackward(const Eigen::MatrixXd& class_weights,
                                     const Eigen::VectorXd& embedding,
                                     int label, double scale, double margin);

double CosineScore(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  uint64_t step = 0;

  bool operator==(const AdamState&) const = default;
};

/// Bias-corrected Adam. Throws kNumeric on a non-finite gradient and kShape
/// on a size mismatch; parameters are untouched in either case.
void AdamStep(std::span<double> parameters, AdamState& state,
              std::span<const double> gradient, double lr,
              const OptimizerConfig& config);

/// Result of a batched forward (and optional backward) pass.
struct BatchOutput {
  Eigen::MatrixXd probabilities;  // num_classes x batch, margin at each label
  double loss_sum = 0.0;       // over trained columns only
  int num_trained = 0;
};

/**
   Fully connected embedding network followed by the additive-margin head.

   All parameters live in one flat vector: for each affine layer its weight
   (out x in, column-major) then its bias, and finally the class-weight
   matrix (num_classes x embedding_dim, column-major). Gradients use the
   same layout.
*/
class Model {
 public:
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  int num_layers() const { return static_cast<int>(layer_dims_.size()) - 1; }
  size_t num_parameters() const { return parameters_.size(); }

  std::span<double> parameters() { return parameters_; }
  std::span<const double> parameters() const { return parameters_; }
  AdamState& adam() { return adam_; }
  const AdamState& adam() const { return adam_; }

  Eigen::Map<Eigen::MatrixXd> LayerWeight(int layer);
  Eigen::Map<const Eigen::MatrixXd> LayerWeight(int layer) const;
  Eigen::Map<Eigen::VectorXd> LayerBias(int layer);
  Eigen::Map<const Eigen::VectorXd> LayerBias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> ClassWeights();
  Eigen::Map<const Eigen::MatrixXd> ClassWeights() const;

  Eigen::VectorXd Embed(std::span<const double> features) const;
  /// Columns of `inputs` are samples.
  Eigen::MatrixXd EmbedBatch(const Eigen::MatrixXd& inputs) const;

  /**
     Forward pass over a batch; columns with train_mask != 0 also contribute
     to the loss and, if `gradient` is non-null, to the gradient, which is
     the mean over trained columns (all zeros when none are trained).
     The margin softmax at each column's label is reported for every
     column, trained or not.
  */
  BatchOutput ForwardBackward(const Eigen::MatrixXd& inputs,
                              std::span<const int> labels,
                              std::span<const char> train_mask,
                              std::vector<double>* gradient) const;

  void ApplyAdam(std::span<const double> gradient, double lr,
                 const OptimizerConfig& optimizer);

  std::string Serialize() const;
  static Model Parse(const std::string& text);
  void Save(const std::string& path) const;
  static Model Load(const std::string& path);

  bool operator==(const Model& other) const {
    return config_ == other.config_ && parameters_ == other.parameters_ &&
           adam_ == other.adam_;
  }

 private:
  void ComputeLayout();

  ModelConfig config_;
  std::vector<int> layer_dims_;  // feature_dim, hidden..., embedding_dim
  std::vector<size_t> weight_offset_;
  std::vector<size_t> bias_offset_;
  size_t class_offset_ = 0;
  std::vector<double> parameters_;
  AdamState adam_;
};

}  // namespace orgate

#endif  // ORGATE_MODEL_HPP_
