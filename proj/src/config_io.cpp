// src/config_io.cpp

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

#include "orgate/config_io.hpp"

#include <initializer_list>
#include <string>

#include "orgate/error.hpp"

namespace orgate {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void CheckKeys(const json& j, const char* what,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    Fail(ErrorKind::kConfig, std::string(what) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known)
      Fail(ErrorKind::kConfig,
           std::string("unknown ") + what + " key '" + item.key() + "'");
  }
}

template <typename T>
void Read(const json& j, const char* key, T* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorKind::kConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ordered_json ToJson(const CorpusConfig& c) {
  ordered_json j;
  j["num_speakers"] = c.num_speakers;
  j["utterances_per_speaker"] = c.utterances_per_speaker;
  j["feature_dim"] = c.feature_dim;
  j["class_separation"] = c.class_separation;
  j["within_class_stddev"] = c.within_class_stddev;
  j["speaker_dim"] = c.speaker_dim;
  j["seed"] = c.seed;
  return j;
}

ordered_json ToJson(const ModelConfig& c) {
  ordered_json j;
  j["feature_dim"] = c.feature_dim;
  j["hidden_dims"] = c.hidden_dims;
  j["embedding_dim"] = c.embedding_dim;
  j["num_classes"] = c.num_classes;
  j["margin"] = c.margin;
  j["scale"] = c.scale;
  j["activation"] = ActivationName(c.activation);
  j["seed"] = c.seed;
  return j;
}

ordered_json ToJson(const OptimizerConfig& c) {
  ordered_json j;
  j["initial_lr"] = c.initial_lr;
  j["lr_decay_factor"] = c.lr_decay_factor;
  j["decay_interval_epochs"] = c.decay_interval_epochs;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["epsilon"] = c.epsilon;
  return j;
}

ordered_json ToJson(const TrainConfig& c) {
  ordered_json j;
  j["mode"] = ModeName(c.mode);
  j["early_epochs"] = c.early_epochs;
  j["top_k"] = c.top_k;
  j["max_epochs"] = c.max_epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["self_alpha"] = c.self_alpha;
  j["eval_interval"] = c.eval_interval;
  j["retain_history"] = c.retain_history;
  j["optimizer"] = ToJson(c.optimizer);
  j["model"] = ToJson(c.model);
  return j;
}

void MergeJson(const json& j, CorpusConfig* c) {
  CheckKeys(j, "corpus", {"num_speakers", "utterances_per_speaker", "feature_dim",
                          "class_separation", "within_class_stddev", "speaker_dim", "seed"});
  Read(j, "num_speakers", &c->num_speakers);
  Read(j, "utterances_per_speaker", &c->utterances_per_speaker);
  Read(j, "feature_dim", &c->feature_dim);
  Read(j, "class_separation", &c->class_separation);
  Read(j, "within_class_stddev", &c->within_class_stddev);
  Read(j, "speaker_dim", &c->speaker_dim);
  Read(j, "seed", &c->seed);
}

void MergeJson(const json& j, ModelConfig* c) {
  CheckKeys(j, "model", {"feature_dim", "hidden_dims", "embedding_dim", "num_classes",
                         "margin", "scale", "activation", "seed"});
  Read(j, "feature_dim", &c->feature_dim);
  Read(j, "hidden_dims", &c->hidden_dims);
  Read(j, "embedding_dim", &c->embedding_dim);
  Read(j, "num_classes", &c->num_classes);
  Read(j, "margin", &c->margin);
  Read(j, "scale", &c->scale);
  if (j.contains("activation")) {
    std::string name;
    Read(j, "activation", &name);
    c->activation = ParseActivation(name);
  }
  Read(j, "seed", &c->seed);
}

void MergeJson(const json& j, OptimizerConfig* c) {
  CheckKeys(j, "optimizer", {"initial_lr", "lr_decay_factor", "decay_interval_epochs",
                             "beta1", "beta2", "epsilon"});
  Read(j, "initial_lr", &c->initial_lr);
  Read(j, "lr_decay_factor", &c->lr_decay_factor);
  Read(j, "decay_interval_epochs", &c->decay_interval_epochs);
  Read(j, "beta1", &c->beta1);
  Read(j, "beta2", &c->beta2);
  Read(j, "epsilon", &c->epsilon);
}

void MergeJson(const json& j, TrainConfig* c) {
  CheckKeys(j, "train", {"mode", "early_epochs", "top_k", "max_epochs", "batch_size",
                         "seed", "self_alpha", "eval_interval", "retain_history",
                         "optimizer", "model"});
  if (j.contains("mode")) {
    std::string name;
    Read(j, "mode", &name);
    c->mode = ParseMode(name);
  }
  Read(j, "early_epochs", &c->early_epochs);
  Read(j, "top_k", &c->top_k);
  Read(j, "max_epochs", &c->max_epochs);
  Read(j, "batch_size", &c->batch_size);
  Read(j, "seed", &c->seed);
  Read(j, "self_alpha", &c->self_alpha);
  Read(j, "eval_interval", &c->eval_interval);
  Read(j, "retain_history", &c->retain_history);
  if (j.contains("optimizer")) MergeJson(j.at("optimizer"), &c->optimizer);
  if (j.contains("model")) MergeJson(j.at("model"), &c->model);
}

json ParseJsonText(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorKind::kParse, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace orgate
