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

// JSON scenario configs, dispatch to the solver/harness/checker, and the
// report files written for each run.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsdecmp/bsde_solver.hpp"
#include "bsdecmp/generator.hpp"

namespace bsdecmp {

/// Either a builtin name ("ex32_g", "linear(1,2,0)") or one expression per component.
struct GeneratorSource {
  std::string builtin;
  std::vector<std::string> expressions;
  std::optional<double> mu;
};

struct TerminalSource {
  std::string builtin;
  std::vector<std::string> expressions;
};

struct PairSampling {
  std::size_t count = 0;  // 0: use terminal / terminal2 as the single pair
  double alpha_scale = 1.0;
  double orth_scale = 1.0;
};

enum class OrderType { Vector, Component, Uniform, Componentwise };

struct OrderConfig {
  OrderType type = OrderType::Component;
  std::vector<double> q;
  std::size_t index = 1;  // one-based, for Component
};

struct CheckerConfig {
  /// "ii", "v", "viability", "necessary_order", "equality"; empty picks
  /// "ii" with two generators and "viability" with one.
  std::string condition;
  Region region;
  std::size_t random_probes = 10000;
  std::size_t shrink_directions = 32;
  int shrink_levels = 20;
  std::size_t samples = 10000;
  /// One-based; absent means every component.
  std::optional<std::size_t> component;
};

struct ScenarioConfig {
  std::string command;  // solve, compare, viability, check-condition, detect-structure
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  double horizon = 1.0;
  std::optional<GeneratorSource> generator;
  std::optional<GeneratorSource> generator2;
  std::optional<TerminalSource> terminal;
  std::optional<TerminalSource> terminal2;
  std::vector<TerminalSource> terminals;
  PairSampling pairs;
  OrderConfig order;
  SchemeConfig scheme;
  CheckerConfig checker;
};

/// Throws ConfigError naming the offending field ("problem.n", ...).
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// 17 significant digits.
std::string format_number(double v);

struct RunReport {
  nlohmann::json body;  // everything except timing
  double wall_seconds = 0.0;
  int exit_code = 0;    // 0 holds, 1 violated
  Table margins;
  Table solution;
  Table checker;

  nlohmann::json to_json() const;
};

/// Runs cfg.command. Throws Error for invalid configs and solver failures.
RunReport run_scenario(const ScenarioConfig& cfg);

/// Writes report.json, margins.csv, solution.csv and checker.csv. Throws IoError.
void emit_tables(const RunReport& report, const std::filesystem::path& dir);

/// Exit status for an error escaping run_scenario: always 2.
inline constexpr int kExitError = 2;

}  // namespace bsdecmp
