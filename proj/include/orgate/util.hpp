// include/orgate/util.hpp

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

#ifndef ORGATE_UTIL_HPP_
#define ORGATE_UTIL_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace orgate {

/// Mixes a base seed with a tag into an independent 64-bit seed
/// (splitmix64 finalizer). Used to derive per-purpose RNG streams.
uint64_t DeriveSeed(uint64_t base, uint64_t tag);

/// Shortest decimal form that parses back to the identical double.
std::string FormatExact(double value);

/// Six significant digits, used for all reported metrics.
std::string FormatMetric(double value);

/// Strict double parse of the whole token; throws kParse on failure.
double ParseDouble(std::string_view token, const std::string& context);
int64_t ParseInt(std::string_view token, const std::string& context);
uint64_t ParseUint(std::string_view token, const std::string& context);

std::vector<std::string_view> Split(std::string_view text, char sep);

void WriteTextFile(const std::string& path, const std::string& contents);
std::string ReadTextFile(const std::string& path);

void LogWarning(const std::string& message);
void SetWarningsEnabled(bool enabled);

}  // namespace orgate

#endif  // ORGATE_UTIL_HPP_
