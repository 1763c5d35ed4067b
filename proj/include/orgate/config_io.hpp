// include/orgate/config_io.hpp

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

// JSON mapping of the configuration structs. Reading is a merge: keys that
// are present override the target's current values, unknown keys are
// rejected with kConfig.

#ifndef ORGATE_CONFIG_IO_HPP_
#define ORGATE_CONFIG_IO_HPP_

#include <json.hpp>

#include "orgate/dataset.hpp"
#include "orgate/model.hpp"
#include "orgate/trainer.hpp"

namespace orgate {

nlohmann::ordered_json ToJson(const CorpusConfig& c);
nlohmann::ordered_json ToJson(const ModelConfig& c);
nlohmann::ordered_json ToJson(const OptimizerConfig& c);
nlohmann::ordered_json ToJson(const TrainConfig& c);

void MergeJson(const nlohmann::json& j, CorpusConfig* c);
void MergeJson(const nlohmann::json& j, ModelConfig* c);
void MergeJson(const nlohmann::json& j, OptimizerConfig* c);
void MergeJson(const nlohmann::json& j, TrainConfig* c);

/// Parses text as JSON, mapping syntax errors to kParse.
nlohmann::json ParseJsonText(const std::string& text);

}  // namespace orgate

#endif  // ORGATE_CONFIG_IO_HPP_
