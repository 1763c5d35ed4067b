// src/model.cpp

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

#include "orgate/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "orgate/error.hpp"
#include "orgate/util.hpp"

namespace orgate {

namespace {

constexpr const char* kCheckpointMagic = "orgate-checkpoint";
constexpr int kCheckpointVersion = 1;

// Stable softmax of `logits` into `out`; returns log of the normalizer.
double Softmax(const Eigen::VectorXd& logits, Eigen::VectorXd* out) {
  const double max = logits.maxCoeff();
  *out = (logits.array() - max).exp();
  const double sum = out->sum();
  *out /= sum;
  return max + std::log(sum);
}

Eigen::VectorXd RowNorms(const Eigen::MatrixXd& w) {
  Eigen::VectorXd norms = w.rowwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j)
    if (!(norms[j] > 0.0) || !std::isfinite(norms[j]))
      Fail(ErrorKind::kNumeric,
           "class weight row " + std::to_string(j) + " has zero norm");
  return norms;
}

void CheckLabel(int label, Eigen::Index num_classes) {
  if (label < 0 || label >= num_classes)
    Fail(ErrorKind::kInput, "label " + std::to_string(label) + " out of range");
}

double CheckedNorm(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    Fail(ErrorKind::kNumeric, "embedding has zero or non-finite norm");
  return norm;
}

}  // namespace

const char* ActivationName(Activation a) {
  return a == Activation::kTanh ? "tanh" : "linear";
}

Activation ParseActivation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "linear") return Activation::kLinear;
  Fail(ErrorKind::kConfig, "unknown activation '" + name + "'");
}

void ModelConfig::Validate() const {
  if (feature_dim < 1) Fail(ErrorKind::kConfig, "feature_dim must be >= 1");
  for (int h : hidden_dims)
    if (h < 1) Fail(ErrorKind::kConfig, "hidden dims must be >= 1");
  if (embedding_dim < 1) Fail(ErrorKind::kConfig, "embedding_dim must be >= 1");
  if (num_classes < 1) Fail(ErrorKind::kConfig, "num_classes must be >= 1");
  if (!(margin >= 0.0) || !std::isfinite(margin))
    Fail(ErrorKind::kConfig, "margin must be finite and >= 0");
  if (!(scale > 0.0) || !std::isfinite(scale))
    Fail(ErrorKind::kConfig, "scale must be finite and > 0");
}

void OptimizerConfig::Validate() const {
  if (!(initial_lr > 0.0)) Fail(ErrorKind::kConfig, "initial_lr must be > 0");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0))
    Fail(ErrorKind::kConfig, "lr_decay_factor must lie in (0, 1]");
  if (decay_interval_epochs < 1)
    Fail(ErrorKind::kConfig, "decay_interval_epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    Fail(ErrorKind::kConfig, "adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) Fail(ErrorKind::kConfig, "adam epsilon must be > 0");
}

double LearningRateAtEpoch(const OptimizerConfig& config, int epoch) {
  if (epoch < 0) Fail(ErrorKind::kConfig, "epoch must be >= 0");
  const int drops = epoch / config.decay_interval_epochs;
  return config.initial_lr * std::pow(config.lr_decay_factor, drops);
}

AmSoftmaxOutput AmSoftmaxForward(const Eigen::MatrixXd& class_weights,
                                 const Eigen::VectorXd& embedding, int label,
                                 double scale, double margin) {
  if (class_weights.cols() != embedding.size())
    Fail(ErrorKind::kShape, "embedding size does not match class weights");
  CheckLabel(label, class_weights.rows());
  const double norm = CheckedNorm(embedding);
  const Eigen::VectorXd row_norms = RowNorms(class_weights);

  AmSoftmaxOutput out;
  out.cosines = (class_weights * (embedding / norm)).cwiseQuotient(row_norms);
  Eigen::VectorXd logits = scale * out.cosines;
  Softmax(logits, &out.posteriors);
  logits[label] -= scale * margin;
  const double log_z = Softmax(logits, &out.probabilities);
  out.loss = log_z - logits[label];
  return out;
}

AmSoftmaxGradients AmSoftmaxBackward(const Eigen::MatrixXd& class_weights,
                                     const Eigen::VectorXd& embedding,
                                     int label, double scale, double margin) {
  const AmSoftmaxOutput fwd =
      AmSoftmaxForward(class_weights, embedding, label, scale, margin);
  const double norm = embedding.norm();
  const Eigen::VectorXd row_norms = class_weights.rowwise().norm();
  const Eigen::VectorXd unit_e = embedding / norm;
  const Eigen::MatrixXd unit_w =
      row_norms.cwiseInverse().asDiagonal() * class_weights;

  // dL/dcos_j = s * (p_j - [j == y])
  Eigen::VectorXd d_cos = scale * fwd.probabilities;
  d_cos[label] -= scale;

  AmSoftmaxGradients g;
  const Eigen::VectorXd d_unit_e = unit_w.transpose() * d_cos;
  g.embedding = (d_unit_e - unit_e * unit_e.dot(d_unit_e)) / norm;
  g.class_weights.resize(class_weights.rows(), class_weights.cols());
  for (Eigen::Index j = 0; j < class_weights.rows(); ++j) {
    g.class_weights.row(j) =
        d_cos[j] * (unit_e.transpose() - fwd.cosines[j] * unit_w.row(j)) /
        row_norms[j];
  }
  return g;
}

double CosineScore(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    Fail(ErrorKind::kShape, "cosine score of vectors with different sizes");
  Eigen::Map<const Eigen::VectorXd> va(a.data(), a.size());
  Eigen::Map<const Eigen::VectorXd> vb(b.data(), b.size());
  const double na = va.norm(), nb = vb.norm();
  if (!(na > 0.0) || !(nb > 0.0))
    Fail(ErrorKind::kNumeric, "cosine score of a zero vector");
  return std::clamp(va.dot(vb) / (na * nb), -1.0, 1.0);
}

void AdamStep(std::span<double> parameters, AdamState& state,
              std::span<const double> gradient, double lr,
              const OptimizerConfig& config) {
  const size_t n = parameters.size();
  if (gradient.size() != n)
    Fail(ErrorKind::kShape, "gradient size does not match parameters");
  for (double g : gradient)
    if (!std::isfinite(g)) Fail(ErrorKind::kNumeric, "non-finite gradient");
  if (state.first_moment.size() != n) {
    state.first_moment.assign(n, 0.0);
    state.second_moment.assign(n, 0.0);
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (size_t i = 0; i < n; ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = config.beta1 * m + (1.0 - config.beta1) * gradient[i];
    v = config.beta2 * v + (1.0 - config.beta2) * gradient[i] * gradient[i];
    parameters[i] -= lr * (m / c1) / (std::sqrt(v / c2) + config.epsilon);
  }
}

Model::Model(const ModelConfig& config) : config_(config) {
  config_.Validate();
  ComputeLayout();
  std::mt19937_64 rng(config_.seed);
  for (int l = 0; l < num_layers(); ++l) {
    const int in = layer_dims_[l], out = layer_dims_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto w = LayerWeight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    LayerBias(l).setZero();
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  auto cw = ClassWeights();
  for (Eigen::Index i = 0; i < cw.size(); ++i) cw.data()[i] = normal(rng);
}

void Model::ComputeLayout() {
  layer_dims_.clear();
  layer_dims_.push_back(config_.feature_dim);
  for (int h : config_.hidden_dims) layer_dims_.push_back(h);
  layer_dims_.push_back(config_.embedding_dim);
  size_t offset = 0;
  weight_offset_.clear();
  bias_offset_.clear();
  for (int l = 0; l < num_layers(); ++l) {
    weight_offset_.push_back(offset);
    offset += static_cast<size_t>(layer_dims_[l]) * layer_dims_[l + 1];
    bias_offset_.push_back(offset);
    offset += layer_dims_[l + 1];
  }
  class_offset_ = offset;
  offset += static_cast<size_t>(config_.num_classes) * config_.embedding_dim;
  parameters_.assign(offset, 0.0);
}

Eigen::Map<Eigen::MatrixXd> Model::LayerWeight(int layer) {
  return {parameters_.data() + weight_offset_.at(layer), layer_dims_[layer + 1],
          layer_dims_[layer]};
}
Eigen::Map<const Eigen::MatrixXd> Model::LayerWeight(int layer) const {
  return {parameters_.data() + weight_offset_.at(layer), layer_dims_[layer + 1],
          layer_dims_[layer]};
}
Eigen::Map<Eigen::VectorXd> Model::LayerBias(int layer) {
  return {parameters_.data() + bias_offset_.at(layer), layer_dims_[layer + 1]};
}
Eigen::Map<const Eigen::VectorXd> Model::LayerBias(int layer) const {
  return {parameters_.data() + bias_offset_.at(layer), layer_dims_[layer + 1]};
}
Eigen::Map<Eigen::MatrixXd> Model::ClassWeights() {
  return {parameters_.data() + class_offset_, config_.num_classes,
          config_.embedding_dim};
}
Eigen::Map<const Eigen::MatrixXd> Model::ClassWeights() const {
  return {parameters_.data() + class_offset_, config_.num_classes,
          config_.embedding_dim};
}

Eigen::MatrixXd Model::EmbedBatch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != config_.feature_dim)
    Fail(ErrorKind::kShape, "input has " + std::to_string(inputs.rows()) +
                                " features, model expects " +
                                std::to_string(config_.feature_dim));
  Eigen::MatrixXd act = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = LayerWeight(l) * act;
    z.colwise() += LayerBias(l);
    const bool hidden = l + 1 < num_layers();
    if (hidden && config_.activation == Activation::kTanh)
      act = z.array().tanh().matrix();
    else
      act = std::move(z);
  }
  return act;
}

Eigen::VectorXd Model::Embed(std::span<const double> features) const {
  Eigen::Map<const Eigen::MatrixXd> x(features.data(), features.size(), 1);
  return EmbedBatch(x);
}

BatchOutput Model::ForwardBackward(const Eigen::MatrixXd& inputs,
                                   std::span<const int> labels,
                                   std::span<const char> train_mask,
                                   std::vector<double>* gradient) const {
  const Eigen::Index batch = inputs.cols();
  if (static_cast<Eigen::Index>(labels.size()) != batch ||
      static_cast<Eigen::Index>(train_mask.size()) != batch)
    Fail(ErrorKind::kShape, "labels/mask size does not match batch");
  if (inputs.rows() != config_.feature_dim)
    Fail(ErrorKind::kShape, "input feature dimension mismatch");
  const int c = config_.num_classes;
  const int layers = num_layers();
  const bool use_tanh = config_.activation == Activation::kTanh;

  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers + 1);
  acts.push_back(inputs);
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = LayerWeight(l) * acts.back();
    z.colwise() += LayerBias(l);
    if (l + 1 < layers && use_tanh) z = z.array().tanh().matrix();
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd& emb = acts.back();

  const Eigen::MatrixXd class_weights = ClassWeights();
  const Eigen::VectorXd row_norms = RowNorms(class_weights);
  const Eigen::MatrixXd unit_w =
      row_norms.cwiseInverse().asDiagonal() * class_weights;
  Eigen::VectorXd norms(batch);
  for (Eigen::Index b = 0; b < batch; ++b) norms[b] = CheckedNorm(emb.col(b));
  const Eigen::MatrixXd unit_e = emb * norms.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd cosines = unit_w * unit_e;

  BatchOutput out;
  out.probabilities.resize(c, batch);
  for (Eigen::Index b = 0; b < batch; ++b)
    if (train_mask[b]) ++out.num_trained;
  Eigen::MatrixXd d_cos = Eigen::MatrixXd::Zero(c, batch);
  const double s = config_.scale;
  Eigen::VectorXd logits, probs;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int y = labels[b];
    CheckLabel(y, c);
    logits = s * cosines.col(b);
    logits[y] -= s * config_.margin;
    const double log_z = Softmax(logits, &probs);
    out.probabilities.col(b) = probs;
    if (!train_mask[b]) continue;
    out.loss_sum += log_z - logits[y];
    d_cos.col(b) = s * probs;
    d_cos(y, b) -= s;
  }
  if (gradient == nullptr) return out;

  gradient->assign(parameters_.size(), 0.0);
  if (out.num_trained == 0) return out;
  d_cos /= static_cast<double>(out.num_trained);

  // Head: cos = W_hat * E_hat.
  const Eigen::MatrixXd d_unit_e = unit_w.transpose() * d_cos;
  const Eigen::MatrixXd d_unit_w = d_cos * unit_e.transpose();
  Eigen::Map<Eigen::MatrixXd> g_class(gradient->data() + class_offset_, c,
                                      config_.embedding_dim);
  for (int j = 0; j < c; ++j) {
    const double proj = unit_w.row(j).dot(d_unit_w.row(j));
    g_class.row(j) = (d_unit_w.row(j) - proj * unit_w.row(j)) / row_norms[j];
  }
  Eigen::MatrixXd d_act(emb.rows(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double proj = unit_e.col(b).dot(d_unit_e.col(b));
    d_act.col(b) = (d_unit_e.col(b) - proj * unit_e.col(b)) / norms[b];
  }

  for (int l = layers - 1; l >= 0; --l) {
    if (l + 1 < layers && use_tanh)
      d_act.array() *= 1.0 - acts[l + 1].array().square();
    Eigen::Map<Eigen::MatrixXd> g_w(gradient->data() + weight_offset_[l],
                                    layer_dims_[l + 1], layer_dims_[l]);
    Eigen::Map<Eigen::VectorXd> g_b(gradient->data() + bias_offset_[l],
                                    layer_dims_[l + 1]);
    g_w.noalias() = d_act * acts[l].transpose();
    g_b = d_act.rowwise().sum();
    if (l > 0) d_act = LayerWeight(l).transpose() * d_act;
  }
  return out;
}

void Model::ApplyAdam(std::span<const double> gradient, double lr,
                      const OptimizerConfig& optimizer) {
  AdamStep(parameters_, adam_, gradient, lr, optimizer);
}

std::string Model::Serialize() const {
  std::string out;
  out += std::string(kCheckpointMagic) + " " + std::to_string(kCheckpointVersion) + "\n";
  out += "feature_dim " + std::to_string(config_.feature_dim) + "\n";
  out += "hidden_dims " + std::to_string(config_.hidden_dims.size());
  for (int h : config_.hidden_dims) out += " " + std::to_string(h);
  out += "\n";
  out += "embedding_dim " + std::to_string(config_.embedding_dim) + "\n";
  out += "num_classes " + std::to_string(config_.num_classes) + "\n";
  out += "margin " + FormatExact(config_.margin) + "\n";
  out += "scale " + FormatExact(config_.scale) + "\n";
  out += std::string("activation ") + ActivationName(config_.activation) + "\n";
  out += "seed " + std::to_string(config_.seed) + "\n";
  out += "num_parameters " + std::to_string(parameters_.size()) + "\n";
  out += "adam_step " + std::to_string(adam_.step) + "\n";
  const bool has_moments = !adam_.first_moment.empty();
  out += std::string("moments ") + (has_moments ? "1" : "0") + "\n";
  auto dump = [&](const char* name, const std::vector<double>& values) {
    out += std::string(name) + "\n";
    for (double v : values) {
      out += FormatExact(v);
      out += '\n';
    }
  };
  dump("parameters", parameters_);
  if (has_moments) {
    dump("first_moment", adam_.first_moment);
    dump("second_moment", adam_.second_moment);
  }
  out += "end\n";
  return out;
}

Model Model::Parse(const std::string& text) {
  auto lines = Split(text, '\n');
  size_t pos = 0;
  auto next = [&](const char* what) -> std::string_view {
    if (pos >= lines.size())
      Fail(ErrorKind::kParse, std::string("checkpoint truncated, expected ") + what);
    return lines[pos++];
  };
  auto ctx = [&] { return "checkpoint line " + std::to_string(pos); };
  auto fields_of = [&](const char* key) {
    auto fields = Split(next(key), ' ');
    if (fields.size() < 2 || fields[0] != key)
      Fail(ErrorKind::kParse, ctx() + ": expected '" + key + "'");
    return fields;
  };

  {
    auto fields = Split(next("header"), ' ');
    if (fields.size() != 2 || fields[0] != kCheckpointMagic)
      Fail(ErrorKind::kFormat, "not an orgate checkpoint");
    if (ParseInt(fields[1], ctx()) != kCheckpointVersion)
      Fail(ErrorKind::kFormat, "unsupported checkpoint version");
  }
  ModelConfig cfg;
  cfg.feature_dim = static_cast<int>(ParseInt(fields_of("feature_dim")[1], ctx()));
  {
    auto f = fields_of("hidden_dims");
    const auto count = ParseInt(f[1], ctx());
    if (count < 0 || static_cast<size_t>(count) + 2 != f.size())
      Fail(ErrorKind::kParse, ctx() + ": malformed hidden_dims");
    cfg.hidden_dims.clear();
    for (size_t i = 2; i < f.size(); ++i)
      cfg.hidden_dims.push_back(static_cast<int>(ParseInt(f[i], ctx())));
  }
  cfg.embedding_dim = static_cast<int>(ParseInt(fields_of("embedding_dim")[1], ctx()));
  cfg.num_classes = static_cast<int>(ParseInt(fields_of("num_classes")[1], ctx()));
  cfg.margin = ParseDouble(fields_of("margin")[1], ctx());
  cfg.scale = ParseDouble(fields_of("scale")[1], ctx());
  try {
    cfg.activation = ParseActivation(std::string(fields_of("activation")[1]));
  } catch (const Error& e) {
    Fail(ErrorKind::kParse, ctx() + ": " + e.what());
  }
  cfg.seed = ParseUint(fields_of("seed")[1], ctx());
  const uint64_t count = ParseUint(fields_of("num_parameters")[1], ctx());
  const uint64_t step = ParseUint(fields_of("adam_step")[1], ctx());
  const int64_t moments = ParseInt(fields_of("moments")[1], ctx());
  try {
    cfg.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kParse, std::string("invalid checkpoint config: ") + e.what());
  }

  Model model(cfg);
  if (count != model.parameters_.size())
    Fail(ErrorKind::kParse, "checkpoint parameter count does not match config");
  auto read_block = [&](const char* name, std::vector<double>& values) {
    if (next(name) != name) Fail(ErrorKind::kParse, ctx() + ": expected " + name);
    values.resize(count);
    for (uint64_t i = 0; i < count; ++i) values[i] = ParseDouble(next(name), ctx());
  };
  read_block("parameters", model.parameters_);
  model.adam_.step = step;
  if (moments == 1) {
    read_block("first_moment", model.adam_.first_moment);
    read_block("second_moment", model.adam_.second_moment);
  }
  if (next("'end'") != "end") Fail(ErrorKind::kParse, ctx() + ": expected 'end'");
  return model;
}

void Model::Save(const std::string& path) const { WriteTextFile(path, Serialize()); }

Model Model::Load(const std::string& path) {
  try {
    return Parse(ReadTextFile(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace orgate
