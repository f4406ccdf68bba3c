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


// Command-line front end. Talks to the library through the C interface only.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bsdecmp/bsdecmp.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string scheme;
  std::size_t steps = 0;
  std::size_t paths = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Flags& f, bool needs_config) {
  auto* c = sub->add_option("--config", f.config, "scenario JSON file");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "override the config seed");
  sub->add_option("--out", f.out, "directory for report.json and CSV tables");
  sub->add_flag("--quiet", f.quiet, "print nothing on success");
}

void add_scheme(CLI::App* sub, Flags& f) {
  sub->add_option("--scheme", f.scheme, "override scheme type")->check(CLI::IsMember({"ode", "tree", "lsmc"}));
  sub->add_option("--steps", f.steps, "override number of time steps")->check(CLI::PositiveNumber);
  sub->add_option("--paths", f.paths, "override number of LSMC paths")->check(CLI::PositiveNumber);
}

int report_error(bsdecmp_status s) {
  std::fprintf(stderr, "error [%s]: %s\n", bsdecmp_status_name(s), bsdecmp_last_error());
  return 2;
}

int finish(bsdecmp_report* rep, const Flags& f) {
  if (!f.out.empty()) {
    const bsdecmp_status s = bsdecmp_report_write(rep, f.out.c_str());
    if (s != BSDECMP_OK) {
      bsdecmp_report_free(rep);
      return report_error(s);
    }
  }
  const int code = bsdecmp_report_exit_code(rep);
  if (!f.quiet || code != 0) {
    std::printf("%s\n", bsdecmp_report_summary(rep));
    if (f.out.empty() && !f.quiet) std::printf("%s\n", bsdecmp_report_json(rep));
  }
  bsdecmp_report_free(rep);
  return code;
}

int run_command(const std::string& command, const Flags& f) {
  bsdecmp_overrides ov{};
  ov.command = command.c_str();
  if (f.seed) {
    ov.has_seed = 1;
    ov.seed = *f.seed;
  }
  if (!f.scheme.empty()) ov.scheme = f.scheme.c_str();
  ov.steps = f.steps;
  ov.paths = f.paths;
  bsdecmp_report* rep = nullptr;
  const bsdecmp_status s = bsdecmp_run_scenario_file(f.config.c_str(), &ov, &rep);
  if (s != BSDECMP_OK) return report_error(s);
  return finish(rep, f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison and viability experiments for multidimensional BSDEs"};
  app.set_version_flag("--version", bsdecmp_version());
  app.require_subcommand(1);

  Flags f;
  const char* commands[] = {"solve", "compare", "viability", "check-condition", "detect-structure"};
  const char* help[] = {"solve one BSDE and tabulate (Y, Z)",
                        "compare two BSDEs under an order on shared randomness",
                        "check that solutions stay in the half-space",
                        "evaluate a generator condition on probes",
                        "report which variables each generator component reads"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(commands[i], help[i]);
    add_common(sub, f, true);
    if (i < 3) add_scheme(sub, f);
  }
  auto* ex = app.add_subcommand("examples", "run the reference suite");
  add_common(ex, f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (ex->parsed()) {
    bsdecmp_report* rep = nullptr;
    const bsdecmp_status s = bsdecmp_reproduce_examples(f.seed.value_or(7), &rep);
    if (s != BSDECMP_OK) return report_error(s);
    return finish(rep, f);
  }
  for (const char* c : commands) {
    if (app.got_subcommand(c)) return run_command(c, f);
  }
  return 2;
}
