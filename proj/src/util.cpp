// src/util.cpp

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

#include "orgate/util.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "orgate/error.hpp"

namespace orgate {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kLookup: return "lookup error";
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

uint64_t DeriveSeed(uint64_t base, uint64_t tag) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string FormatExact(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string FormatMetric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

double ParseDouble(std::string_view token, const std::string& context) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, value);
  if (token.empty() || res.ec != std::errc() || res.ptr != end)
    Fail(ErrorKind::kParse, context + ": invalid real '" +
                                std::string(token) + "'");
  return value;
}

int64_t ParseInt(std::string_view token, const std::string& context) {
  int64_t value = 0;
  const char* end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, value);
  if (token.empty() || res.ec != std::errc() || res.ptr != end)
    Fail(ErrorKind::kParse, context + ": invalid integer '" +
                                std::string(token) + "'");
  return value;
}

uint64_t ParseUint(std::string_view token, const std::string& context) {
  uint64_t value = 0;
  const char* end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, value);
  if (token.empty() || res.ec != std::errc() || res.ptr != end)
    Fail(ErrorKind::kParse, context + ": invalid unsigned integer '" +
                                std::string(token) + "'");
  return value;
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  os << contents;
  os.flush();
  if (!os) Fail(ErrorKind::kIo, "write to '" + path + "' failed");
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {
std::atomic<bool> g_warnings_enabled{true};
}

void LogWarning(const std::string& message) {
  if (g_warnings_enabled.load()) std::cerr << "WARNING: " << message << '\n';
}

void SetWarningsEnabled(bool enabled) { g_warnings_enabled.store(enabled); }

}  // namespace orgate
