// Copyright 2026 The Chewtex Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chewtex {

/// Classifies every error the library raises. The CLI maps kinds to exit
/// codes: configuration problems exit with 2, bad inputs with 3.
enum class ErrorKind {
  kConfig,            // invalid parameters or options
  kFormat,            // malformed file content
  kUnsupportedCodec,  // well-formed WAV with an encoding we do not decode
  kUnsupportedRate,   // non-integer decimation factor
  kValidation,        // annotation rows that break the chew/bout invariants
  kAnnotation,        // segment outside its recording
  kSegmentTooShort,
  kShape,             // dimension mismatch between model and data
  kDegenerateLabels,  // single-class training input
  kSchema,            // incompatible model/report schema
  kDesign,            // filter cannot be realized
  kUndefinedMetric,
  kProtocol,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace chewtex
