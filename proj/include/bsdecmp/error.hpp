// Copyright 2026 The bsdecmp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bsdecmp {

// Numeric values are shared with the C API status codes in bsdecmp.h.
enum class ErrorCode : int {
  ZeroVector = 1,
  DimensionMismatch = 2,
  OnBoundary = 3,
  SingularSystem = 4,
  SyntaxError = 5,
  UnknownVariable = 6,
  IndexOutOfRange = 7,
  NonFinite = 8,
  UnknownBuiltin = 9,
  BadArgs = 10,
  NotDeterministic = 11,
  TooLarge = 12,
  PicardDiverged = 13,
  IllConditioned = 14,
  TerminalNotInK = 15,
  ConfigError = 16,
  IoError = 17,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure; `position` is the zero-based character offset in the input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& what, std::size_t position)
      : Error(code, what + " at position " + std::to_string(position)),
        detail_(what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }
  /// Message without the position suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t position_;
};

}  // namespace bsdecmp
