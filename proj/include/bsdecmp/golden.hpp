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

// Fixed suite of reference scenarios with their expected values.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace bsdecmp {

struct GoldenReport {
  nlohmann::json body;  // sections and checks; no timing
  double wall_seconds = 0.0;
  bool all_passed = true;
  std::string markdown;

  nlohmann::json to_json() const;
};

GoldenReport reproduce_examples(std::uint64_t seed = 7);

/// Writes report.json and summary.md. Throws IoError.
void write_golden(const GoldenReport& report, const std::filesystem::path& dir);

}  // namespace bsdecmp
