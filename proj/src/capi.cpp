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


#include "bsdecmp/bsdecmp.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "bsdecmp/bsde_solver.hpp"
#include "bsdecmp/condition_checker.hpp"
#include "bsdecmp/error.hpp"
#include "bsdecmp/golden.hpp"
#include "bsdecmp/order_geometry.hpp"
#include "bsdecmp/scenario.hpp"

struct bsdecmp_direction {
  bsdecmp::Direction q;
};

struct bsdecmp_generator {
  bsdecmp::Generator g;
};

struct bsdecmp_terminal {
  bsdecmp::TerminalFn xi;
};

struct bsdecmp_report {
  std::optional<bsdecmp::RunReport> run;
  std::optional<bsdecmp::GoldenReport> golden;
  std::string json;
  std::string summary;
  int exit_code = 0;
};

namespace {

using bsdecmp::Error;
using bsdecmp::ErrorCode;
using bsdecmp::Matrix;
using bsdecmp::Vector;

thread_local std::string t_last_error;
thread_local long t_last_position = -1;

bsdecmp_status fail(bsdecmp_status s, std::string msg, long position = -1) {
  t_last_error = std::move(msg);
  t_last_position = position;
  return s;
}

template <class Fn>
bsdecmp_status guarded(Fn&& fn) noexcept {
  t_last_error.clear();
  t_last_position = -1;
  try {
    fn();
    return BSDECMP_OK;
  } catch (const bsdecmp::ParseError& e) {
    return fail(static_cast<bsdecmp_status>(e.code()), e.what(), static_cast<long>(e.position()));
  } catch (const Error& e) {
    return fail(static_cast<bsdecmp_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BSDECMP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BSDECMP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BSDECMP_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* name) {
  if (!p) throw Error(ErrorCode::BadArgs, std::string(name) + " is NULL");
}

Vector vec(const double* p, std::size_t n) { return Eigen::Map<const Vector>(p, static_cast<Eigen::Index>(n)); }

Matrix mat(const double* p, std::size_t n, std::size_t d) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(p, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
}

std::vector<std::string> strings(const char* const* e, std::size_t n) {
  need(e, "expressions");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    need(e[i], "expression");
    out.emplace_back(e[i]);
  }
  return out;
}

void apply(bsdecmp::ScenarioConfig& cfg, const bsdecmp_overrides* ov) {
  if (!ov) return;
  if (ov->command) cfg.command = ov->command;
  if (ov->has_seed) cfg.seed = ov->seed;
  if (ov->scheme) cfg.scheme.type = bsdecmp::scheme_from_string(ov->scheme);
  if (ov->steps) cfg.scheme.steps = ov->steps;
  if (ov->paths) cfg.scheme.paths = ov->paths;
  cfg.scheme.seed = cfg.seed;
}

bsdecmp_report* wrap(bsdecmp::RunReport r) {
  auto* out = new bsdecmp_report;
  out->exit_code = r.exit_code;
  out->json = r.to_json().dump(2);
  out->summary = std::string(r.body.value("command", "")) + ": " + r.body.value("verdict", "") + " (" +
                 bsdecmp::format_number(r.wall_seconds) + " s)";
  out->run = std::move(r);
  return out;
}

bsdecmp_status run_config(bsdecmp::ScenarioConfig cfg, const bsdecmp_overrides* ov, bsdecmp_report** out) {
  return guarded([&] {
    apply(cfg, ov);
    *out = wrap(bsdecmp::run_scenario(cfg));
  });
}

}  // namespace

extern "C" {

const char* bsdecmp_version(void) { return BSDECMP_VERSION; }

const char* bsdecmp_status_name(bsdecmp_status status) {
  if (status == BSDECMP_OK) return "Ok";
  if (status == BSDECMP_ERR_INTERNAL) return "Internal";
  return bsdecmp::to_string(static_cast<ErrorCode>(status));
}

const char* bsdecmp_last_error(void) { return t_last_error.c_str(); }

long bsdecmp_last_error_position(void) { return t_last_position; }

bsdecmp_status bsdecmp_direction_create(const double* q, size_t n, bsdecmp_direction** out) {
  return guarded([&] {
    need(q, "q");
    need(out, "out");
    if (n == 0) throw Error(ErrorCode::BadArgs, "n must be positive");
    *out = new bsdecmp_direction{bsdecmp::Direction::from_vector(vec(q, n))};
  });
}

bsdecmp_status bsdecmp_direction_uniform(size_t n, bsdecmp_direction** out) {
  return guarded([&] {
    need(out, "out");
    if (n == 0) throw Error(ErrorCode::BadArgs, "n must be positive");
    *out = new bsdecmp_direction{bsdecmp::Direction::uniform(n)};
  });
}

bsdecmp_status bsdecmp_direction_unit(size_t n, size_t i, bsdecmp_direction** out) {
  return guarded([&] {
    need(out, "out");
    if (i < 1 || i > n) throw Error(ErrorCode::IndexOutOfRange, "direction index must be in 1..n");
    *out = new bsdecmp_direction{bsdecmp::Direction::unit(n, i - 1)};
  });
}

void bsdecmp_direction_free(bsdecmp_direction* q) { delete q; }

size_t bsdecmp_direction_dim(const bsdecmp_direction* q) { return q ? q->q.n() : 0; }

bsdecmp_status bsdecmp_direction_get(const bsdecmp_direction* q, double* q_out, size_t n) {
  return guarded([&] {
    need(q, "q");
    need(q_out, "q_out");
    if (n != q->q.n()) throw Error(ErrorCode::DimensionMismatch, "buffer length differs from direction dimension");
    std::memcpy(q_out, q->q.q().data(), n * sizeof(double));
  });
}

bsdecmp_status bsdecmp_project(const bsdecmp_direction* q, const double* y, size_t n, double* proj_out,
                               double* dist_out) {
  return guarded([&] {
    need(q, "q");
    need(y, "y");
    if (n != q->q.n()) throw Error(ErrorCode::DimensionMismatch, "y length differs from direction dimension");
    const auto geo = bsdecmp::HalfSpaceGeometry::plain(q->q);
    const Vector yy = vec(y, n);
    if (proj_out) {
      const Vector p = geo.project(yy);
      std::memcpy(proj_out, p.data(), n * sizeof(double));
    }
    if (dist_out) *dist_out = geo.dist(yy);
  });
}

bsdecmp_status bsdecmp_generator_parse(size_t n, size_t d, const char* const* expressions, const double* mu,
                                       bsdecmp_generator** out) {
  return guarded([&] {
    need(out, "out");
    std::optional<double> m;
    if (mu) m = *mu;
    *out = new bsdecmp_generator{bsdecmp::Generator::parse(n, d, strings(expressions, n), m)};
  });
}

bsdecmp_status bsdecmp_generator_builtin(const char* name, bsdecmp_generator** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = new bsdecmp_generator{bsdecmp::builtin_generator(name)};
  });
}

void bsdecmp_generator_free(bsdecmp_generator* g) { delete g; }

bsdecmp_status bsdecmp_generator_info(const bsdecmp_generator* g, size_t* n, size_t* d, double* mu) {
  return guarded([&] {
    need(g, "g");
    if (n) *n = g->g.n();
    if (d) *d = g->g.d();
    if (mu) *mu = g->g.mu();
  });
}

bsdecmp_status bsdecmp_generator_eval(const bsdecmp_generator* g, double t, const double* y, const double* z,
                                      double* out) {
  return guarded([&] {
    need(g, "g");
    need(y, "y");
    need(z, "z");
    need(out, "out");
    const Vector r = g->g.eval(t, vec(y, g->g.n()), mat(z, g->g.n(), g->g.d()));
    std::memcpy(out, r.data(), g->g.n() * sizeof(double));
  });
}

bsdecmp_status bsdecmp_terminal_parse(size_t n, size_t d, const char* const* expressions, bsdecmp_terminal** out) {
  return guarded([&] {
    need(out, "out");
    *out = new bsdecmp_terminal{bsdecmp::TerminalFn::parse(n, d, strings(expressions, n))};
  });
}

bsdecmp_status bsdecmp_terminal_builtin(const char* name, bsdecmp_terminal** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = new bsdecmp_terminal{bsdecmp::builtin_terminal(name)};
  });
}

void bsdecmp_terminal_free(bsdecmp_terminal* xi) { delete xi; }

bsdecmp_status bsdecmp_terminal_eval(const bsdecmp_terminal* xi, const double* w, double* out) {
  return guarded([&] {
    need(xi, "xi");
    need(w, "w");
    need(out, "out");
    const Vector r = xi->xi.eval(vec(w, xi->xi.d()));
    std::memcpy(out, r.data(), xi->xi.n() * sizeof(double));
  });
}

bsdecmp_status bsdecmp_c_required(const bsdecmp_generator* g1, const bsdecmp_generator* g2,
                                  const bsdecmp_direction* q, double t, const double* y, const double* y_prime,
                                  const double* z, const double* z_prime, double* out) {
  return guarded([&] {
    need(g1, "g1");
    need(g2, "g2");
    need(q, "q");
    need(y, "y");
    need(y_prime, "y_prime");
    need(z, "z");
    need(z_prime, "z_prime");
    need(out, "out");
    const std::size_t n = g1->g.n();
    const std::size_t d = g1->g.d();
    if (q->q.n() != n) throw Error(ErrorCode::DimensionMismatch, "direction does not match generator dimension");
    *out = bsdecmp::c_required(g1->g, g2->g, q->q, t, vec(y, n), vec(y_prime, n), mat(z, n, d),
                               mat(z_prime, n, d));
  });
}

bsdecmp_status bsdecmp_solve_y0(const bsdecmp_generator* g, const bsdecmp_terminal* xi, double horizon,
                                const char* scheme, size_t steps, size_t paths, uint64_t seed, double* y0_out) {
  return guarded([&] {
    need(g, "g");
    need(xi, "xi");
    need(scheme, "scheme");
    need(y0_out, "y0_out");
    bsdecmp::SchemeConfig sc;
    sc.type = bsdecmp::scheme_from_string(scheme);
    sc.steps = steps;
    if (paths) sc.paths = paths;
    sc.seed = seed;
    const bsdecmp::Solution sol = bsdecmp::solve(bsdecmp::BsdeSpec(g->g, xi->xi, horizon), sc);
    const Vector y0 = sol.y(0, 0);
    std::memcpy(y0_out, y0.data(), static_cast<std::size_t>(y0.size()) * sizeof(double));
  });
}

bsdecmp_status bsdecmp_run_scenario_json(const char* config_json, const bsdecmp_overrides* overrides,
                                         bsdecmp_report** out) {
  bsdecmp::ScenarioConfig cfg;
  const bsdecmp_status s = guarded([&] {
    need(config_json, "config_json");
    need(out, "out");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
    }
    cfg = bsdecmp::parse_config(doc);
  });
  if (s != BSDECMP_OK) return s;
  return run_config(std::move(cfg), overrides, out);
}

bsdecmp_status bsdecmp_run_scenario_file(const char* path, const bsdecmp_overrides* overrides,
                                         bsdecmp_report** out) {
  bsdecmp::ScenarioConfig cfg;
  const bsdecmp_status s = guarded([&] {
    need(path, "path");
    need(out, "out");
    cfg = bsdecmp::load_config(path);
  });
  if (s != BSDECMP_OK) return s;
  return run_config(std::move(cfg), overrides, out);
}

bsdecmp_status bsdecmp_reproduce_examples(uint64_t seed, bsdecmp_report** out) {
  return guarded([&] {
    need(out, "out");
    bsdecmp::GoldenReport g = bsdecmp::reproduce_examples(seed);
    auto* r = new bsdecmp_report;
    r->exit_code = g.all_passed ? 0 : 1;
    r->json = g.to_json().dump(2);
    r->summary = g.markdown;
    r->golden = std::move(g);
    *out = r;
  });
}

int bsdecmp_report_exit_code(const bsdecmp_report* r) { return r ? r->exit_code : 2; }

const char* bsdecmp_report_json(const bsdecmp_report* r) { return r ? r->json.c_str() : ""; }

const char* bsdecmp_report_summary(const bsdecmp_report* r) { return r ? r->summary.c_str() : ""; }

bsdecmp_status bsdecmp_report_write(const bsdecmp_report* r, const char* dir) {
  return guarded([&] {
    need(r, "report");
    need(dir, "dir");
    if (r->run) bsdecmp::emit_tables(*r->run, dir);
    else bsdecmp::write_golden(*r->golden, dir);
  });
}

void bsdecmp_report_free(bsdecmp_report* r) { delete r; }

}  // extern "C"
