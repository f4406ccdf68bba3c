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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bsdecmp/error.hpp"
#include "bsdecmp/scenario.hpp"

namespace bsdecmp {
namespace {

using nlohmann::json;

json solve_doc(std::size_t steps) {
  return json::parse(R"J({"command": "solve", "seed": 1,
    "problem": {"n": 1, "d": 1, "generator": {"builtin": "zero"}, "terminal": {"expressions": ["w1"]}},
    "scheme": {"type": "tree", "steps": )J" + std::to_string(steps) + "}}");
}

std::string config_error_message(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error";
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bsdecmp_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(Config, MissingSeed) {
  json doc = solve_doc(4);
  doc.erase("seed");
  EXPECT_NE(config_error_message(doc).find("seed"), std::string::npos);
}

TEST(Config, UnknownKeyNamesPath) {
  json doc = solve_doc(4);
  doc["scheme"]["stepz"] = 3;
  EXPECT_NE(config_error_message(doc).find("scheme.stepz"), std::string::npos);
}

TEST(Config, WrongTypeNamesPath) {
  json doc = solve_doc(4);
  doc["problem"]["n"] = "two";
  EXPECT_NE(config_error_message(doc).find("problem.n"), std::string::npos);
}

TEST(Config, DimensionsFromBuiltin) {
  json doc = json::parse(R"J({"seed": 2, "problem": {"generator": {"builtin": "ex32_g"}}})J");
  const ScenarioConfig cfg = parse_config(doc);
  EXPECT_EQ(cfg.n, 2u);
  EXPECT_EQ(cfg.d, 1u);
}

TEST(Config, MalformedExpressionKeepsPosition) {
  json doc = solve_doc(4);
  doc["problem"]["generator"] = {{"expressions", {"y1 +"}}};
  try {
    run_scenario(parse_config(doc));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
    EXPECT_NE(std::string(e.what()).find("problem.generator"), std::string::npos);
  } catch (const Error& e) {
    // Parsing may happen eagerly in parse_config; either way the position survives.
    FAIL() << e.what();
  }
}

TEST(Config, RoundTrip) {
  const json doc = json::parse(R"J({"command": "check-condition", "seed": 9,
    "problem": {"n": 2, "d": 1, "horizon": 0.5,
      "generator": {"expressions": ["y1 + y2", "abs(z2)"], "mu": 2.0},
      "generator2": {"builtin": "ex32_g"},
      "terminal": {"expressions": ["w1", "0"]}, "pairs": {"count": 3, "alpha_scale": 0.5, "orth_scale": 2}},
    "order": {"type": "vector", "q": [1, 2]},
    "scheme": {"type": "lsmc", "steps": 6, "paths": 500},
    "checker": {"condition": "ii", "random_probes": 50, "region": {"t": [0, 0.5], "y_bound": 2, "z_bound": 3}}})J");
  const ScenarioConfig a = parse_config(doc);
  const json emitted = config_to_json(a);
  const ScenarioConfig b = parse_config(emitted);
  EXPECT_EQ(emitted, config_to_json(b));
  EXPECT_EQ(b.seed, 9u);
  EXPECT_EQ(b.pairs.count, 3u);
  EXPECT_EQ(b.checker.region.z_bound, 3.0);
  EXPECT_EQ(b.scheme.paths, 500u);
}

TEST(Run, SolveMartingale) {
  const RunReport r = run_scenario(parse_config(solve_doc(4)));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NEAR(r.body["results"]["y0"][0].get<double>(), 0.0, 1e-15);
  EXPECT_NEAR(r.body["results"]["z0"][0][0].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(r.to_json().contains("timing"));
  EXPECT_FALSE(r.body.contains("timing"));
}

TEST(Run, SolutionTableHasEveryNode) {
  const RunReport r = run_scenario(parse_config(solve_doc(2)));
  EXPECT_EQ(r.solution.rows.size(), 7u);
  EXPECT_EQ(r.solution.header.size(), 2u + 1u + 1u);
}

TEST(Run, CheckerLeavesMarginsEmpty) {
  const json doc = json::parse(R"J({"command": "check-condition", "seed": 3,
    "problem": {"generator": {"builtin": "zero(1,1)"}, "generator2": {"builtin": "zero(1,1)"}},
    "order": {"type": "e_i", "index": 1},
    "checker": {"condition": "ii", "random_probes": 20, "shrink_directions": 2, "shrink_levels": 4}})J");
  const RunReport r = run_scenario(parse_config(doc));
  EXPECT_EQ(r.exit_code, 0);
  const auto dir = scratch("empty");
  emit_tables(r, dir);
  EXPECT_EQ(slurp(dir / "margins.csv"), "trial,t,node_or_path,margin\n");
  EXPECT_EQ(slurp(dir / "solution.csv").find('\n'), slurp(dir / "solution.csv").size() - 1);
  EXPECT_FALSE(r.checker.rows.empty());
  std::filesystem::remove_all(dir);
}

TEST(Run, ViolationExitsOne) {
  const json doc = json::parse(R"J({"command": "compare", "seed": 7,
    "problem": {"generator": {"builtin": "ex32_g"}, "generator2": {"builtin": "ex32_g"},
      "terminal": {"builtin": "ex32_xi1"}, "terminal2": {"builtin": "ex32_xi2"}},
    "order": {"type": "e_i", "index": 1}, "scheme": {"type": "ode", "steps": 32}})J");
  const RunReport r = run_scenario(parse_config(doc));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.body["verdict"], "violated");
}

TEST(Run, UnknownCommand) {
  json doc = solve_doc(2);
  doc["command"] = "integrate";
  EXPECT_THROW(run_scenario(parse_config(doc)), Error);
}

TEST(Run, ReportsAreByteIdenticalWithoutTiming) {
  const json doc = json::parse(R"J({"command": "compare", "seed": 5,
    "problem": {"n": 1, "d": 1, "generator": {"expressions": ["sin(y1) + z1 + 1"]},
      "generator2": {"expressions": ["sin(y1) + z1"]}, "terminal2": {"expressions": ["sin(w1)"]},
      "pairs": {"count": 4}},
    "order": {"type": "vector", "q": [1]}, "scheme": {"type": "lsmc", "steps": 4, "paths": 800}})J");
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  emit_tables(run_scenario(parse_config(doc)), a);
  emit_tables(run_scenario(parse_config(doc)), b);
  json ja = json::parse(slurp(a / "report.json"));
  json jb = json::parse(slurp(b / "report.json"));
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja.dump(), jb.dump());
  for (const char* f : {"margins.csv", "solution.csv", "checker.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
}

}  // namespace
}  // namespace bsdecmp
