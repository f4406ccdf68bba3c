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


#include "bsdecmp/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bsdecmp/comparison_harness.hpp"
#include "bsdecmp/condition_checker.hpp"
#include "bsdecmp/error.hpp"

namespace bsdecmp {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) config_error(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) config_error(path.empty() ? k : path + "." + k, "unknown field");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) config_error(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(join(path, key), "must be finite");
  return x;
}

std::uint64_t get_uint(const json& obj, const std::string& key, const std::string& path, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    config_error(join(path, key), "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) config_error(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> get_strings(const json& v, const std::string& path) {
  if (!v.is_array()) config_error(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) config_error(path + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

GeneratorSource parse_generator_source(const json& v, const std::string& path) {
  allow_keys(v, path, {"builtin", "expressions", "mu"});
  GeneratorSource src;
  const bool has_builtin = v.contains("builtin");
  const bool has_expr = v.contains("expressions");
  if (has_builtin == has_expr) config_error(path, "give exactly one of 'builtin' and 'expressions'");
  if (has_builtin) src.builtin = get_string(v, "builtin", path, "");
  if (has_expr) src.expressions = get_strings(v.at("expressions"), join(path, "expressions"));
  if (v.contains("mu")) {
    src.mu = get_number(v, "mu", path, 0.0);
    if (*src.mu < 0.0) config_error(join(path, "mu"), "must be nonnegative");
  }
  return src;
}

TerminalSource parse_terminal_source(const json& v, const std::string& path) {
  allow_keys(v, path, {"builtin", "expressions"});
  TerminalSource src;
  const bool has_builtin = v.contains("builtin");
  const bool has_expr = v.contains("expressions");
  if (has_builtin == has_expr) config_error(path, "give exactly one of 'builtin' and 'expressions'");
  if (has_builtin) src.builtin = get_string(v, "builtin", path, "");
  if (has_expr) src.expressions = get_strings(v.at("expressions"), join(path, "expressions"));
  return src;
}

json generator_source_json(const GeneratorSource& s) {
  json j = json::object();
  if (!s.builtin.empty()) j["builtin"] = s.builtin;
  else j["expressions"] = s.expressions;
  if (s.mu) j["mu"] = *s.mu;
  return j;
}

json terminal_source_json(const TerminalSource& s) {
  json j = json::object();
  if (!s.builtin.empty()) j["builtin"] = s.builtin;
  else j["expressions"] = s.expressions;
  return j;
}

const char* order_type_name(OrderType t) {
  switch (t) {
    case OrderType::Vector: return "vector";
    case OrderType::Component: return "e_i";
    case OrderType::Uniform: return "uniform";
    case OrderType::Componentwise: return "componentwise";
  }
  return "?";
}

template <class Fn>
auto with_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(e.code(), path + ": " + e.detail(), e.position());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Generator make_generator(const GeneratorSource& src, std::size_t n, std::size_t d, const std::string& path) {
  return with_path(path, [&] {
    if (!src.builtin.empty()) {
      Generator g = builtin_generator(src.builtin);
      if (g.n() != n || g.d() != d) {
        throw Error(ErrorCode::DimensionMismatch, "builtin '" + src.builtin + "' has (n=" + std::to_string(g.n()) +
                                                      ", d=" + std::to_string(g.d()) + ")");
      }
      return src.mu ? g.with_mu(*src.mu) : g;
    }
    if (src.expressions.size() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(n) + " expressions, got " + std::to_string(src.expressions.size()));
    }
    return Generator::parse(n, d, src.expressions, src.mu);
  });
}

TerminalFn make_terminal(const TerminalSource& src, std::size_t n, std::size_t d, const std::string& path) {
  return with_path(path, [&] {
    if (!src.builtin.empty()) {
      TerminalFn f = builtin_terminal(src.builtin);
      if (f.n() != n || f.d() != d) {
        throw Error(ErrorCode::DimensionMismatch, "builtin '" + src.builtin + "' has (n=" + std::to_string(f.n()) +
                                                      ", d=" + std::to_string(f.d()) + ")");
      }
      return f;
    }
    if (src.expressions.size() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(n) + " expressions, got " + std::to_string(src.expressions.size()));
    }
    return TerminalFn::parse(n, d, src.expressions);
  });
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

json to_json(const MarginPoint& p) {
  return {{"trial", p.trial}, {"step", p.step}, {"t", p.t}, {"node", p.node}, {"margin", p.margin}};
}

Table margins_header() { return {{"trial", "t", "node_or_path", "margin"}, {}}; }

Table solution_header(std::size_t n, std::size_t d) {
  Table t;
  t.header = {"t", "node_or_path"};
  for (std::size_t i = 1; i <= n; ++i) t.header.push_back("Y" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= d; ++j) t.header.push_back("Z" + std::to_string(i) + std::to_string(j));
  }
  return t;
}

Table checker_header() { return {{"probe_id", "t", "epsilon", "C_required"}, {}}; }

void append_margins(Table& t, const std::vector<MarginPoint>& pts) {
  for (const auto& p : pts) {
    t.rows.push_back({std::to_string(p.trial), format_number(p.t), std::to_string(p.node), format_number(p.margin)});
  }
}

// Resolved objects for one scenario.
struct Problem {
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<Generator> g1;
  std::optional<Generator> g2;
};

Problem resolve_problem(const ScenarioConfig& cfg) {
  Problem p{cfg.n, cfg.d, std::nullopt, std::nullopt};
  if (cfg.generator) p.g1 = make_generator(*cfg.generator, cfg.n, cfg.d, "problem.generator");
  if (cfg.generator2) p.g2 = make_generator(*cfg.generator2, cfg.n, cfg.d, "problem.generator2");
  return p;
}

const Generator& require(const std::optional<Generator>& g, const char* path) {
  if (!g) config_error(path, "required for this command");
  return *g;
}

Direction order_direction(const OrderConfig& o, std::size_t n) {
  return with_path("order", [&] {
    switch (o.type) {
      case OrderType::Vector: {
        if (o.q.size() != n) {
          throw Error(ErrorCode::DimensionMismatch, "q has " + std::to_string(o.q.size()) + " entries, n = " +
                                                        std::to_string(n));
        }
        return Direction::from_vector(Eigen::Map<const Vector>(o.q.data(), static_cast<Eigen::Index>(n)));
      }
      case OrderType::Component:
        if (o.index < 1 || o.index > n) throw Error(ErrorCode::IndexOutOfRange, "index must be in 1..n");
        return Direction::unit(n, o.index - 1);
      case OrderType::Uniform:
        return Direction::uniform(n);
      case OrderType::Componentwise:
        throw Error(ErrorCode::ConfigError, "componentwise order has no single direction");
    }
    throw Error(ErrorCode::ConfigError, "unknown order type");
  });
}

ComparisonOrder comparison_order(const OrderConfig& o, std::size_t n) {
  if (o.type == OrderType::Componentwise) return ComparisonOrder::all_components(n);
  if (o.type == OrderType::Component) {
    order_direction(o, n);
    return ComparisonOrder::component(n, o.index - 1);
  }
  return ComparisonOrder::along(order_direction(o, n));
}

ProbeSchedule schedule_of(const ScenarioConfig& cfg) {
  ProbeSchedule s;
  s.region = cfg.checker.region;
  s.random_probes = cfg.checker.random_probes;
  s.shrink_directions = cfg.checker.shrink_directions;
  s.shrink_levels = cfg.checker.shrink_levels;
  s.seed = cfg.seed;
  s.workers = cfg.scheme.workers;
  return s;
}

json condition_json(const ConditionReport& r) {
  json fits = json::array();
  for (const auto& f : r.fits) {
    fits.push_back({{"sequence", f.sequence}, {"fitted", f.fitted}, {"slope", f.slope}, {"r_squared", f.r_squared}});
  }
  json w = {{"t", r.witness.t}, {"y", to_json(r.witness.y)}, {"z", to_json(r.witness.z)}, {"c_required", r.witness.c}};
  if (r.witness.y_prime.size()) {
    w["y_prime"] = to_json(r.witness.y_prime);
    w["z_prime"] = to_json(r.witness.z_prime);
  }
  return {{"condition", r.condition},
          {"direction", to_json(r.direction)},
          {"binding_probes", r.binding_probes},
          {"positive_probes", r.positive_probes},
          {"sup_c_required", r.sup_c_required},
          {"mean_c_required", r.mean_c_required},
          {"growth_exponent", r.growth_exponent ? json(*r.growth_exponent) : json(nullptr)},
          {"classification", r.classification()},
          {"witness", w},
          {"fits", fits}};
}

void append_probes(Table& t, const ConditionReport& r, std::size_t& next_id) {
  for (const auto& p : r.probes) {
    t.rows.push_back({std::to_string(next_id++), format_number(p.t), format_number(p.epsilon), format_number(p.c)});
  }
}

json point_json(const PointWitness& p) { return {{"t", p.t}, {"y", to_json(p.y)}, {"z", to_json(p.z)}}; }

// ---------------------------------------------------------------------------

void run_solve(const ScenarioConfig& cfg, const Problem& p, RunReport& out) {
  const Generator& g = require(p.g1, "problem.generator");
  if (!cfg.terminal) config_error("problem.terminal", "required for solve");
  const TerminalFn xi = make_terminal(*cfg.terminal, p.n, p.d, "problem.terminal");
  const Solution sol = solve(BsdeSpec(g, xi, cfg.horizon), cfg.scheme);
  const AssumptionReport assumptions = validate_assumptions(g, cfg.horizon, 1024, cfg.seed);

  json res = {{"y0", to_json(sol.y(0, 0))}, {"z0", to_json(sol.z(0, 0))}, {"mu", g.mu()}};
  if (const auto* t = sol.tree()) res["picard_iterations"] = t->picard_iters;
  if (const auto* l = sol.lsmc()) res["y0_std_error"] = to_json(l->y0_std_error);
  res["assumptions"] = {{"pass", assumptions.pass()},
                        {"finite", assumptions.finite},
                        {"continuous_in_t", assumptions.continuous_in_t},
                        {"bounded_at_origin", assumptions.bounded_at_origin},
                        {"sup_at_origin", assumptions.sup_at_origin},
                        {"violations", assumptions.violations},
                        {"warnings", assumptions.warnings}};
  out.body["results"] = res;
  out.exit_code = assumptions.pass() ? 0 : 1;

  for (std::size_t k = 0; k <= sol.steps(); ++k) {
    for (std::size_t i = 0; i < sol.count(k); ++i) {
      std::vector<std::string> row{format_number(sol.grid().t(k)), std::to_string(i)};
      const Vector y = sol.y(k, i);
      const Matrix z = sol.z(k, i);
      for (Eigen::Index a = 0; a < y.size(); ++a) row.push_back(format_number(y(a)));
      for (Eigen::Index a = 0; a < z.rows(); ++a) {
        for (Eigen::Index b = 0; b < z.cols(); ++b) row.push_back(format_number(z(a, b)));
      }
      out.solution.rows.push_back(std::move(row));
    }
  }
}

void run_compare(const ScenarioConfig& cfg, const Problem& p, RunReport& out) {
  const Generator& g1 = require(p.g1, "problem.generator");
  const Generator& g2 = require(p.g2, "problem.generator2");
  const ComparisonOrder order = comparison_order(cfg.order, p.n);

  std::vector<TerminalPair> pairs;
  if (cfg.pairs.count > 0) {
    const TerminalSource* base_src = cfg.terminal2 ? &*cfg.terminal2 : (cfg.terminal ? &*cfg.terminal : nullptr);
    const TerminalFn base = base_src ? make_terminal(*base_src, p.n, p.d, "problem.terminal2")
                                     : TerminalFn::constant(p.d, Vector::Zero(static_cast<Eigen::Index>(p.n)));
    OrderedTerminalOptions opts{cfg.pairs.alpha_scale, cfg.pairs.orth_scale};
    pairs = cfg.order.type == OrderType::Componentwise
                ? sample_componentwise_terminals(base, cfg.pairs.count, cfg.seed, opts)
                : sample_ordered_terminals(order.directions.front(), base, cfg.pairs.count, cfg.seed, opts);
  } else {
    if (!cfg.terminal) config_error("problem.terminal", "required for compare without problem.pairs");
    if (!cfg.terminal2) config_error("problem.terminal2", "required for compare without problem.pairs");
    pairs.push_back({make_terminal(*cfg.terminal, p.n, p.d, "problem.terminal"),
                     make_terminal(*cfg.terminal2, p.n, p.d, "problem.terminal2")});
  }

  // Terminal ordering is a precondition; report it, the run goes ahead either way.
  bool ordered = true;
  {
    auto eng = stream_engine(cfg.seed, 0xC0FFEEull);
    Vector w(static_cast<Eigen::Index>(p.d));
    for (const auto& pr : pairs) {
      for (int s = 0; s < 256 && ordered; ++s) {
        for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = 3.0 * std::sqrt(cfg.horizon) * standard_normal(eng);
        if (order.margin(pr.xi1.eval(w) - pr.xi2.eval(w)) < -1e-12) ordered = false;
      }
    }
  }

  const ComparisonReport rep = run_comparison(g1, g2, order, pairs, cfg.horizon, cfg.scheme);
  json trials = json::array();
  for (std::size_t k = 0; k < rep.trial_min.size(); ++k) {
    trials.push_back({{"trial", k}, {"min", to_json(rep.trial_min[k])}, {"margin_at_t0", rep.origin_margin[k]}});
  }
  json dirs = json::array();
  for (const auto& q : rep.directions) dirs.push_back(to_json(q));
  out.body["results"] = {{"order", rep.order_label},
                         {"directions", dirs},
                         {"pairs", pairs.size()},
                         {"terminals_ordered", ordered},
                         {"tolerance", rep.tolerance},
                         {"min_margin", rep.min_margin},
                         {"witness", pairs.empty() ? json(nullptr) : to_json(rep.witness)},
                         {"trials", trials},
                         {"verdict", rep.holds ? "holds" : "violated"}};
  out.exit_code = rep.holds ? 0 : 1;
  append_margins(out.margins, rep.margins);
}

void run_viability_cmd(const ScenarioConfig& cfg, const Problem& p, RunReport& out) {
  const Generator& g = require(p.g1, "problem.generator");
  const Direction q = order_direction(cfg.order, p.n);
  std::vector<TerminalFn> terms;
  for (std::size_t k = 0; k < cfg.terminals.size(); ++k) {
    terms.push_back(make_terminal(cfg.terminals[k], p.n, p.d, "problem.terminals[" + std::to_string(k) + "]"));
  }
  if (terms.empty()) {
    if (!cfg.terminal) config_error("problem.terminals", "viability needs problem.terminals or problem.terminal");
    terms.push_back(make_terminal(*cfg.terminal, p.n, p.d, "problem.terminal"));
  }
  const ViabilityReport rep = run_viability(g, q, terms, cfg.horizon, cfg.scheme);
  out.body["results"] = {{"direction", to_json(rep.direction)},
                         {"terminals", terms.size()},
                         {"tolerance", rep.tolerance},
                         {"min_margin", rep.min_margin},
                         {"witness", to_json(rep.witness)},
                         {"verdict", rep.holds ? "holds" : "violated"}};
  out.exit_code = rep.holds ? 0 : 1;
  append_margins(out.margins, rep.margins);
}

void run_check(const ScenarioConfig& cfg, const Problem& p, RunReport& out) {
  std::string cond = cfg.checker.condition;
  if (cond.empty()) cond = p.g2 ? "ii" : "viability";
  const ProbeSchedule sched = schedule_of(cfg);
  std::vector<std::size_t> comps;
  if (cfg.checker.component) {
    if (*cfg.checker.component < 1 || *cfg.checker.component > p.n) {
      config_error("checker.component", "must be in 1..n");
    }
    comps.push_back(*cfg.checker.component - 1);
  } else {
    for (std::size_t i = 0; i < p.n; ++i) comps.push_back(i);
  }

  json res = {{"condition", cond}};
  bool ok = true;
  std::size_t next_id = 0;
  if (cond == "ii") {
    const ConditionReport r = check_condition_ii(require(p.g1, "problem.generator"),
                                                 require(p.g2, "problem.generator2"),
                                                 order_direction(cfg.order, p.n), sched);
    res["reports"] = json::array({condition_json(r)});
    ok = !r.divergent;
    append_probes(out.checker, r, next_id);
  } else if (cond == "v") {
    res["reports"] = json::array();
    for (std::size_t i : comps) {
      const ConditionReport r = check_condition_v(require(p.g1, "problem.generator"),
                                                  require(p.g2, "problem.generator2"), i, sched);
      json j = condition_json(r);
      j["component"] = i + 1;
      res["reports"].push_back(j);
      ok = ok && !r.divergent;
      append_probes(out.checker, r, next_id);
    }
  } else if (cond == "viability") {
    const ConditionReport r =
        check_viability_condition(require(p.g1, "problem.generator"), order_direction(cfg.order, p.n), sched);
    res["reports"] = json::array({condition_json(r)});
    ok = !r.divergent;
    append_probes(out.checker, r, next_id);
  } else if (cond == "necessary_order") {
    const OrderCheckReport r =
        check_necessary_order(require(p.g1, "problem.generator"), require(p.g2, "problem.generator2"),
                              order_direction(cfg.order, p.n), cfg.checker.region, cfg.checker.samples, cfg.seed);
    res["reports"] = json::array(
        {{{"min_margin", r.min_margin}, {"witness", point_json(r.witness)}, {"verdict", r.holds ? "holds" : "violated"}}});
    ok = r.holds;
  } else if (cond == "equality") {
    res["reports"] = json::array();
    for (std::size_t i : comps) {
      const EqualityReport r =
          check_componentwise_equality(require(p.g1, "problem.generator"), require(p.g2, "problem.generator2"), i,
                                       cfg.checker.region, cfg.checker.samples, cfg.seed);
      res["reports"].push_back({{"component", i + 1},
                                {"max_gap", r.max_gap},
                                {"witness", point_json(r.witness)},
                                {"verdict", r.equal ? "equal" : "unequal"}});
      ok = ok && r.equal;
    }
  } else {
    config_error("checker.condition", "unknown condition '" + cond + "'");
  }
  res["verdict"] = ok ? "holds" : "violated";
  out.body["results"] = res;
  out.exit_code = ok ? 0 : 1;
}

void run_structure(const ScenarioConfig& cfg, const Problem& p, RunReport& out) {
  const Generator& g = require(p.g1, "problem.generator");
  std::vector<std::size_t> comps;
  if (cfg.checker.component) {
    if (*cfg.checker.component < 1 || *cfg.checker.component > p.n) {
      config_error("checker.component", "must be in 1..n");
    }
    comps.push_back(*cfg.checker.component - 1);
  } else {
    for (std::size_t i = 0; i < p.n; ++i) comps.push_back(i);
  }
  json masks = json::array();
  bool ok = true;
  for (std::size_t i : comps) {
    const DependenceMask m = detect_structure(g, i, cfg.checker.region, cfg.checker.samples, cfg.seed);
    json ys = json::array();
    json zs = json::array();
    for (std::size_t j = 0; j < m.depends_on_y.size(); ++j) {
      if (m.depends_on_y[j]) ys.push_back(j + 1);
      if (m.depends_on_z[j]) zs.push_back(j + 1);
    }
    masks.push_back({{"component", i + 1},
                     {"depends_on_y", ys},
                     {"depends_on_z", zs},
                     {"threshold", m.threshold},
                     {"samples", m.samples},
                     {"diagonal", m.diagonal()}});
    ok = ok && m.diagonal();
  }
  out.body["results"] = {{"masks", masks}, {"verdict", ok ? "holds" : "violated"}};
  out.exit_code = ok ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScenarioConfig parse_config(const json& doc) {
  allow_keys(doc, "", {"command", "seed", "problem", "order", "scheme", "checker"});
  ScenarioConfig cfg;
  cfg.command = get_string(doc, "command", "", "");
  if (!doc.contains("seed")) config_error("seed", "is required");
  cfg.seed = get_uint(doc, "seed", "", 0);

  if (!doc.contains("problem")) config_error("problem", "is required");
  const json& pr = doc.at("problem");
  allow_keys(pr, "problem",
             {"n", "d", "horizon", "generator", "generator2", "terminal", "terminal2", "terminals", "pairs"});
  if (pr.contains("generator")) cfg.generator = parse_generator_source(pr.at("generator"), "problem.generator");
  if (pr.contains("generator2")) cfg.generator2 = parse_generator_source(pr.at("generator2"), "problem.generator2");
  if (pr.contains("terminal")) cfg.terminal = parse_terminal_source(pr.at("terminal"), "problem.terminal");
  if (pr.contains("terminal2")) cfg.terminal2 = parse_terminal_source(pr.at("terminal2"), "problem.terminal2");
  if (pr.contains("terminals")) {
    const json& ts = pr.at("terminals");
    if (!ts.is_array()) config_error("problem.terminals", "expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      cfg.terminals.push_back(parse_terminal_source(ts[i], "problem.terminals[" + std::to_string(i) + "]"));
    }
  }
  if (pr.contains("pairs")) {
    const json& ps = pr.at("pairs");
    allow_keys(ps, "problem.pairs", {"count", "alpha_scale", "orth_scale"});
    cfg.pairs.count = get_uint(ps, "count", "problem.pairs", 0);
    cfg.pairs.alpha_scale = get_number(ps, "alpha_scale", "problem.pairs", 1.0);
    cfg.pairs.orth_scale = get_number(ps, "orth_scale", "problem.pairs", 1.0);
    if (cfg.pairs.alpha_scale < 0.0) config_error("problem.pairs.alpha_scale", "must be nonnegative");
  }
  cfg.horizon = get_number(pr, "horizon", "problem", 1.0);
  if (!(cfg.horizon > 0.0)) config_error("problem.horizon", "must be positive");

  // n and d may be left out when a builtin generator fixes them.
  std::size_t bn = 0;
  std::size_t bd = 0;
  for (const auto* src : {cfg.generator ? &*cfg.generator : nullptr, cfg.generator2 ? &*cfg.generator2 : nullptr}) {
    if (src && !src->builtin.empty() && bn == 0) {
      const Generator g = with_path("problem.generator", [&] { return builtin_generator(src->builtin); });
      bn = g.n();
      bd = g.d();
    }
  }
  cfg.n = get_uint(pr, "n", "problem", bn);
  cfg.d = get_uint(pr, "d", "problem", bd);
  if (cfg.n == 0) config_error("problem.n", "is required (positive integer)");
  if (cfg.d == 0) config_error("problem.d", "is required (positive integer)");
  if (cfg.n > 64 || cfg.d > 24) config_error("problem", "n must be <= 64 and d <= 24");

  if (doc.contains("order")) {
    const json& o = doc.at("order");
    allow_keys(o, "order", {"type", "q", "index"});
    const std::string type = get_string(o, "type", "order", "e_i");
    if (type == "vector") {
      cfg.order.type = OrderType::Vector;
      if (!o.contains("q") || !o.at("q").is_array()) config_error("order.q", "expected an array of numbers");
      for (const auto& x : o.at("q")) {
        if (!x.is_number()) config_error("order.q", "expected an array of numbers");
        cfg.order.q.push_back(x.get<double>());
      }
    } else if (type == "e_i") {
      cfg.order.type = OrderType::Component;
      cfg.order.index = get_uint(o, "index", "order", 1);
    } else if (type == "uniform") {
      cfg.order.type = OrderType::Uniform;
    } else if (type == "componentwise") {
      cfg.order.type = OrderType::Componentwise;
    } else {
      config_error("order.type", "expected vector, e_i, uniform or componentwise");
    }
  }

  if (doc.contains("scheme")) {
    const json& s = doc.at("scheme");
    allow_keys(s, "scheme", {"type", "steps", "paths", "basis_degree", "picard_tol", "theta", "workers"});
    with_path("scheme.type", [&] { cfg.scheme.type = scheme_from_string(get_string(s, "type", "scheme", "tree")); });
    cfg.scheme.steps = get_uint(s, "steps", "scheme", cfg.scheme.steps);
    cfg.scheme.paths = get_uint(s, "paths", "scheme", cfg.scheme.paths);
    cfg.scheme.basis_degree = static_cast<int>(get_uint(s, "basis_degree", "scheme", 2));
    cfg.scheme.picard_tol = get_number(s, "picard_tol", "scheme", cfg.scheme.picard_tol);
    cfg.scheme.theta = get_number(s, "theta", "scheme", cfg.scheme.theta);
    cfg.scheme.workers = get_uint(s, "workers", "scheme", 1);
    if (cfg.scheme.steps < 1) config_error("scheme.steps", "must be >= 1");
    if (!(cfg.scheme.picard_tol > 0.0)) config_error("scheme.picard_tol", "must be positive");
    if (!(cfg.scheme.theta >= 0.5 && cfg.scheme.theta <= 1.0)) config_error("scheme.theta", "must be in [0.5, 1]");
    if (cfg.scheme.workers < 1) cfg.scheme.workers = 1;
  }
  cfg.scheme.seed = cfg.seed;

  if (doc.contains("checker")) {
    const json& c = doc.at("checker");
    allow_keys(c, "checker",
               {"condition", "region", "random_probes", "shrink_directions", "shrink_levels", "samples", "component"});
    cfg.checker.condition = get_string(c, "condition", "checker", "");
    if (c.contains("region")) {
      const json& r = c.at("region");
      allow_keys(r, "checker.region", {"t", "y_bound", "z_bound"});
      if (r.contains("t")) {
        const json& t = r.at("t");
        if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number()) {
          config_error("checker.region.t", "expected [t_lo, t_hi]");
        }
        cfg.checker.region.t_lo = t[0].get<double>();
        cfg.checker.region.t_hi = t[1].get<double>();
        if (!(cfg.checker.region.t_lo <= cfg.checker.region.t_hi)) config_error("checker.region.t", "t_lo > t_hi");
      }
      cfg.checker.region.y_bound = get_number(r, "y_bound", "checker.region", 5.0);
      cfg.checker.region.z_bound = get_number(r, "z_bound", "checker.region", 5.0);
      if (!(cfg.checker.region.y_bound > 0.0)) config_error("checker.region.y_bound", "must be positive");
      if (!(cfg.checker.region.z_bound >= 0.0)) config_error("checker.region.z_bound", "must be nonnegative");
    }
    cfg.checker.random_probes = get_uint(c, "random_probes", "checker", 10000);
    cfg.checker.shrink_directions = get_uint(c, "shrink_directions", "checker", 32);
    cfg.checker.shrink_levels = static_cast<int>(get_uint(c, "shrink_levels", "checker", 20));
    cfg.checker.samples = get_uint(c, "samples", "checker", 10000);
    if (c.contains("component")) cfg.checker.component = get_uint(c, "component", "checker", 1);
    if (cfg.checker.shrink_levels < 1 || cfg.checker.shrink_levels > 60) {
      config_error("checker.shrink_levels", "must be in 1..60");
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ScenarioConfig& cfg) {
  json pr = {{"n", cfg.n}, {"d", cfg.d}, {"horizon", cfg.horizon}};
  if (cfg.generator) pr["generator"] = generator_source_json(*cfg.generator);
  if (cfg.generator2) pr["generator2"] = generator_source_json(*cfg.generator2);
  if (cfg.terminal) pr["terminal"] = terminal_source_json(*cfg.terminal);
  if (cfg.terminal2) pr["terminal2"] = terminal_source_json(*cfg.terminal2);
  if (!cfg.terminals.empty()) {
    pr["terminals"] = json::array();
    for (const auto& t : cfg.terminals) pr["terminals"].push_back(terminal_source_json(t));
  }
  if (cfg.pairs.count > 0) {
    pr["pairs"] = {{"count", cfg.pairs.count},
                   {"alpha_scale", cfg.pairs.alpha_scale},
                   {"orth_scale", cfg.pairs.orth_scale}};
  }
  json order = {{"type", order_type_name(cfg.order.type)}};
  if (cfg.order.type == OrderType::Vector) order["q"] = cfg.order.q;
  if (cfg.order.type == OrderType::Component) order["index"] = cfg.order.index;
  const Region& r = cfg.checker.region;
  json checker = {{"region", {{"t", {r.t_lo, r.t_hi}}, {"y_bound", r.y_bound}, {"z_bound", r.z_bound}}},
                  {"random_probes", cfg.checker.random_probes},
                  {"shrink_directions", cfg.checker.shrink_directions},
                  {"shrink_levels", cfg.checker.shrink_levels},
                  {"samples", cfg.checker.samples}};
  if (!cfg.checker.condition.empty()) checker["condition"] = cfg.checker.condition;
  if (cfg.checker.component) checker["component"] = *cfg.checker.component;
  json doc = {{"seed", cfg.seed},
              {"problem", pr},
              {"order", order},
              {"scheme",
               {{"type", to_string(cfg.scheme.type)},
                {"steps", cfg.scheme.steps},
                {"paths", cfg.scheme.paths},
                {"basis_degree", cfg.scheme.basis_degree},
                {"picard_tol", cfg.scheme.picard_tol},
                {"theta", cfg.scheme.theta},
                {"workers", cfg.scheme.workers}}},
              {"checker", checker}};
  if (!cfg.command.empty()) doc["command"] = cfg.command;
  return doc;
}

json RunReport::to_json() const {
  json j = body;
  j["timing"] = {{"wall_seconds", wall_seconds}};
  return j;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport out;
  out.margins = margins_header();
  out.solution = solution_header(cfg.n, cfg.d);
  out.checker = checker_header();
  out.body = {{"tool", "bsdecmp"}, {"version", BSDECMP_VERSION}, {"command", cfg.command},
              {"config", config_to_json(cfg)}};

  const Problem p = resolve_problem(cfg);
  if (cfg.command == "solve") run_solve(cfg, p, out);
  else if (cfg.command == "compare") run_compare(cfg, p, out);
  else if (cfg.command == "viability") run_viability_cmd(cfg, p, out);
  else if (cfg.command == "check-condition") run_check(cfg, p, out);
  else if (cfg.command == "detect-structure") run_structure(cfg, p, out);
  else config_error("command", "unknown command '" + cfg.command + "'");

  out.body["verdict"] = out.exit_code == 0 ? "holds" : "violated";
  out.body["exit_code"] = out.exit_code;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

void write_csv(const Table& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

void emit_tables(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "report.json").string());
    out << report.to_json().dump(2) << '\n';
  }
  write_csv(report.margins, dir / "margins.csv");
  write_csv(report.solution, dir / "solution.csv");
  write_csv(report.checker, dir / "checker.csv");
}

}  // namespace bsdecmp
