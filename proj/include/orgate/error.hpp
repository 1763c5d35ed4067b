// include/orgate/error.hpp

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

#ifndef ORGATE_ERROR_HPP_
#define ORGATE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace orgate {

/// Category of a failure. The numeric values are mirrored by the C API
/// status codes, so do not reorder.
enum class ErrorKind {
  kConfig = 1,
  kState = 2,
  kParse = 3,
  kFormat = 4,
  kNumeric = 5,
  kShape = 6,
  kLookup = 7,
  kInput = 8,
  kIo = 9,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace orgate

#endif  // ORGATE_ERROR_HPP_
