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


#include "bsdecmp/golden.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsdecmp/comparison_harness.hpp"
#include "bsdecmp/condition_checker.hpp"
#include "bsdecmp/error.hpp"
#include "bsdecmp/scenario.hpp"

namespace bsdecmp {

using nlohmann::json;

namespace {

const double kE1 = std::exp(1.0) - 1.0;

class Section {
 public:
  Section(std::string id, std::string title) : id_(std::move(id)), title_(std::move(title)) {}

  void near(const std::string& name, double value, double expected, double tol) {
    const bool ok = std::abs(value - expected) <= tol;
    checks_.push_back({{"name", name}, {"value", value}, {"expected", expected}, {"tolerance", tol}, {"pass", ok}});
    passed_ = passed_ && ok;
  }
  void at_most(const std::string& name, double value, double bound) {
    const bool ok = value <= bound;
    checks_.push_back({{"name", name}, {"value", value}, {"at_most", bound}, {"pass", ok}});
    passed_ = passed_ && ok;
  }
  void at_least(const std::string& name, double value, double bound) {
    const bool ok = value >= bound;
    checks_.push_back({{"name", name}, {"value", value}, {"at_least", bound}, {"pass", ok}});
    passed_ = passed_ && ok;
  }
  void flag(const std::string& name, const std::string& value, const std::string& expected) {
    const bool ok = value == expected;
    checks_.push_back({{"name", name}, {"value", value}, {"expected", expected}, {"pass", ok}});
    passed_ = passed_ && ok;
  }
  void data(const std::string& key, json v) { data_[key] = std::move(v); }

  bool passed() const { return passed_; }
  json to_json() const {
    return {{"id", id_}, {"title", title_}, {"passed", passed_}, {"checks", checks_}, {"data", data_}};
  }

 private:
  std::string id_;
  std::string title_;
  json checks_ = json::array();
  json data_ = json::object();
  bool passed_ = true;
};

std::string verdict(bool holds) { return holds ? "holds" : "violated"; }

Matrix zeros(std::size_t n, std::size_t d) {
  return Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
}

SchemeConfig tree_scheme(std::size_t steps, std::uint64_t seed) {
  SchemeConfig s;
  s.type = SchemeType::Tree;
  s.steps = steps;
  s.seed = seed;
  return s;
}

ProbeSchedule default_schedule(std::uint64_t seed) {
  ProbeSchedule s;
  s.seed = seed;
  return s;
}

json condition_summary(const ConditionReport& r) {
  return {{"classification", r.classification()},
          {"sup_c_required", r.sup_c_required},
          {"growth_exponent", r.growth_exponent ? json(*r.growth_exponent) : json(nullptr)},
          {"binding_probes", r.binding_probes},
          {"positive_probes", r.positive_probes}};
}

// (a) Two-dimensional pair whose required constant grows like 1/|y1|.
Section section_a(std::uint64_t seed) {
  Section s("a", "half-space pair without a uniform constant");
  const Generator g1 = builtin_generator("ex31_g1");
  const Generator g2 = builtin_generator("ex31_g2");
  const Direction e1 = Direction::unit(2, 0);
  json table = json::array();
  for (double y1 : {-1.0, -0.5, -0.25, -0.125}) {
    Vector y(2);
    y << y1, -3.0;
    const double c = c_required(g1, g2, e1, 0.5, y, Vector::Zero(2), zeros(2, 1), zeros(2, 1));
    table.push_back({{"y1", y1}, {"c_required", c}});
    s.near("c_required(y1=" + format_number(y1) + ")", c, -8.0 / y1, 1e-12);
  }
  s.data("c_required_table", table);

  ProbeSchedule sched = default_schedule(seed);
  ShrinkSequence along;
  along.t = 0.5;
  along.base = Vector(2);
  along.base << 0.0, -3.0;
  along.direction = e1.q();
  along.y_prime = Vector::Zero(2);
  along.z = zeros(2, 1);
  along.z_prime = zeros(2, 1);
  sched.extra_sequences.push_back(along);
  const ConditionReport rep = check_condition_ii(g1, g2, e1, sched);
  s.data("condition", condition_summary(rep));
  s.flag("classification", rep.classification(), "divergent");
  s.near("growth_exponent", rep.growth_exponent.value_or(0.0), -1.0, 0.05);

  const Region region;
  const OrderCheckReport fwd = check_necessary_order(g1, g2, e1, region, 10000, seed);
  const OrderCheckReport rev = check_necessary_order(g2, g1, e1, region, 10000, seed);
  s.near("necessary_order_margin", fwd.min_margin, 1.0, 1e-12);
  s.flag("necessary_order", verdict(fwd.holds), "holds");
  s.near("swapped_margin", rev.min_margin, -1.0, 1e-12);
  s.flag("swapped_order", verdict(rev.holds), "violated");
  const EqualityReport eq1 = check_componentwise_equality(g1, g2, 0, region, 10000, seed);
  const EqualityReport eq2 = check_componentwise_equality(g1, g2, 1, region, 10000, seed);
  s.near("component_1_gap", eq1.max_gap, 1.0, 1e-12);
  s.flag("component_1", eq1.equal ? "equal" : "unequal", "unequal");
  s.near("component_2_gap", eq2.max_gap, 0.0, 1e-12);
  s.flag("component_2", eq2.equal ? "equal" : "unequal", "equal");

  const TerminalFn xi1 = TerminalFn::parse(2, 1, {"pos(w1) + 1", "sin(w1)"});
  const TerminalFn xi2 = TerminalFn::parse(2, 1, {"0.5 * w1", "w1"});
  const double residual = check_doubled_consistency(g1, g2, xi1, xi2, 1.0, tree_scheme(8, seed));
  s.at_most("doubled_system_residual", residual, 1e-8);
  return s;
}

// (b) Coupled pair whose first component reverses the terminal order.
Section section_b(std::uint64_t seed) {
  Section s("b", "coupled first component, comparison in e_1 fails");
  const Generator g = builtin_generator("ex32_g");
  const TerminalFn xi1 = builtin_terminal("ex32_xi1");
  const TerminalFn xi2 = builtin_terminal("ex32_xi2");
  const std::vector<TerminalPair> pair{{xi1, xi2}};
  const ComparisonOrder e1 = ComparisonOrder::component(2, 0);

  SchemeConfig ode;
  ode.type = SchemeType::Ode;
  ode.steps = 64;
  ode.seed = seed;
  const Solution y2 = solve(BsdeSpec(g, xi2, 1.0), ode);
  s.near("ode_Y2_1(0)", y2.y(0, 0)(0), kE1, 1e-6);
  const ComparisonReport r_ode = run_comparison(g, g, e1, pair, 1.0, ode);
  s.near("ode_margin_t0", r_ode.origin_margin.front(), -kE1, 1e-6);
  s.flag("ode_verdict", verdict(r_ode.holds), "violated");

  const ComparisonReport r_tree = run_comparison(g, g, e1, pair, 1.0, tree_scheme(16, seed));
  s.near("tree16_margin_t0", r_tree.origin_margin.front(), -kE1, 0.05);
  s.flag("tree16_verdict", verdict(r_tree.holds), "violated");

  const Region region;
  const DependenceMask m1 = detect_structure(g, 0, region, 1000, seed);
  const DependenceMask m2 = detect_structure(g, 1, region, 1000, seed);
  s.flag("structure_component_1", m1.diagonal() ? "diagonal" : "coupled", "coupled");
  s.flag("structure_component_2", m2.diagonal() ? "diagonal" : "coupled", "diagonal");
  auto mask_json = [](const DependenceMask& m) {
    json ys = json::array();
    json zs = json::array();
    for (std::size_t j = 0; j < m.depends_on_y.size(); ++j) {
      if (m.depends_on_y[j]) ys.push_back(j + 1);
      if (m.depends_on_z[j]) zs.push_back(j + 1);
    }
    return json{{"depends_on_y", ys}, {"depends_on_z", zs}};
  };
  s.data("structure", {mask_json(m1), mask_json(m2)});

  const double residual = check_doubled_consistency(g, g, xi1, xi2, 1.0, tree_scheme(8, seed));
  s.at_most("doubled_system_residual", residual, 1e-8);
  return s;
}

// (c) Scalar case: constant shift of a 1-Lipschitz generator.
Section section_c(std::uint64_t seed) {
  Section s("c", "scalar shift, bounded constant and comparison");
  const Generator g2 = Generator::parse(1, 1, {"sin(y1) + z1_1"});
  const Generator g1 = Generator::parse(1, 1, {"sin(y1) + z1_1 + 1"}, g2.mu());
  const Direction q = Direction::from_vector(Vector::Ones(1));
  const ConditionReport rep = check_condition_ii(g1, g2, q, default_schedule(seed));
  s.data("condition", condition_summary(rep));
  s.data("mu_hat", g2.mu());
  s.flag("classification", rep.classification(), "bounded");
  s.at_most("sup_c_required", rep.sup_c_required, 2.0 * g2.mu() * g2.mu() + 0.01);

  const OrderCheckReport ord = check_necessary_order(g1, g2, q, Region{}, 10000, seed);
  s.flag("necessary_order", verdict(ord.holds), "holds");

  const TerminalFn base = TerminalFn::parse(1, 1, {"sin(w1)"});
  const auto pairs = sample_ordered_terminals(q, base, 100, seed);
  const ComparisonReport cmp = run_comparison(g1, g2, ComparisonOrder::along(q), pairs, 1.0, tree_scheme(12, seed));
  s.at_least("min_margin_100_pairs", cmp.min_margin, -1e-9);
  s.flag("comparison", verdict(cmp.holds), "holds");
  return s;
}

// (d) Componentwise runs on the coupled pair.
Section section_d(std::uint64_t seed) {
  Section s("d", "componentwise order on the coupled pair");
  const Generator g = builtin_generator("ex32_g");
  const TerminalFn base = TerminalFn::parse(2, 1, {"sin(w1)", "pos(w1)"});
  const auto pairs = sample_componentwise_terminals(base, 20, seed);
  const ComparisonReport all =
      run_comparison(g, g, ComparisonOrder::all_components(2), pairs, 1.0, tree_scheme(8, seed));
  s.at_least("componentwise_min_margin", all.min_margin, -1e-9);
  s.flag("componentwise", verdict(all.holds), "holds");

  const std::vector<TerminalPair> one{{builtin_terminal("ex32_xi1"), builtin_terminal("ex32_xi2")}};
  const ComparisonReport first =
      run_comparison(g, g, ComparisonOrder::component(2, 0), one, 1.0, tree_scheme(8, seed));
  s.flag("component_1_only", verdict(first.holds), "violated");

  const ConditionReport v1 = check_condition_v(g, g, 0, default_schedule(seed));
  const ConditionReport v2 = check_condition_v(g, g, 1, default_schedule(seed));
  s.data("condition_v", {condition_summary(v1), condition_summary(v2)});
  s.flag("condition_v_1", v1.classification(), "divergent");
  s.flag("condition_v_2", v2.classification(), "bounded");
  s.at_most("condition_v_2_sup", v2.sup_c_required, 2.0 * g.mu() * g.mu() + 0.01);
  return s;
}

// (e) Uniform direction on diagonal fixtures.
Section section_e(std::uint64_t seed) {
  Section s("e", "uniform direction on diagonal generators");
  const Generator g2 = Generator::parse(2, 1, {"y1", "y2"});
  const Generator g1 = Generator::parse(2, 1, {"y1 + 1", "y2 + 1"});
  const Direction q = Direction::uniform(2);
  const ConditionReport rep = check_condition_ii(g1, g2, q, default_schedule(seed));
  s.data("condition", condition_summary(rep));
  s.flag("classification", rep.classification(), "bounded");

  // Closed form against the double sum over components, on random probes.
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    auto eng = stream_engine(seed, 0xE000 + k);
    Vector y(2);
    Vector yp(2);
    Matrix z(2, 1);
    Matrix zp(2, 1);
    for (int i = 0; i < 2; ++i) {
      y(i) = uniform(eng, -5, 5);
      yp(i) = uniform(eng, -5, 5);
      z(i, 0) = uniform(eng, -5, 5);
      zp(i, 0) = uniform(eng, -5, 5);
    }
    if (y.dot(q.q()) > 0) y = -y;
    const double a = c_required(g1, g2, q, 0.5, y, yp, z, zp);
    const double b = c_required_sum_form(g1, g2, q, 0.5, y, yp, z, zp);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  s.at_most("closed_vs_sum_form", worst, 1e-12);

  const Generator demo = builtin_generator("diag_demo");
  for (std::size_t i = 0; i < 2; ++i) {
    const DependenceMask m = detect_structure(demo, i, Region{}, 1000, seed);
    const ConditionReport v = check_condition_v(demo, demo, i, default_schedule(seed));
    const std::string tag = "diag_demo_" + std::to_string(i + 1);
    s.flag(tag + "_structure", m.diagonal() ? "diagonal" : "coupled", "diagonal");
    s.flag(tag + "_condition_v", v.classification(), "bounded");
  }
  return s;
}

std::string brief(const json& v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
  return buf;
}

std::string render_markdown(const json& body) {
  std::ostringstream md;
  md << "# bsdecmp reference runs\n\n";
  md << "seed: " << body["seed"].get<std::uint64_t>() << "\n\n";
  for (const auto& sec : body["sections"]) {
    md << "## (" << sec["id"].get<std::string>() << ") " << sec["title"].get<std::string>() << "\n\n";
    md << "| check | value | expected | result |\n|---|---|---|---|\n";
    for (const auto& c : sec["checks"]) {
      std::string value = c["value"].is_string() ? c["value"].get<std::string>() : brief(c["value"]);
      std::string expected;
      if (c.contains("expected")) {
        expected = c["expected"].is_string() ? c["expected"].get<std::string>()
                                             : brief(c["expected"]) + " +- " + brief(c["tolerance"]);
      } else if (c.contains("at_most")) {
        expected = "<= " + brief(c["at_most"]);
      } else {
        expected = ">= " + brief(c["at_least"]);
      }
      md << "| " << c["name"].get<std::string>() << " | " << value << " | " << expected << " | "
         << (c["pass"].get<bool>() ? "pass" : "FAIL") << " |\n";
    }
    md << "\n";
  }
  md << (body["all_passed"].get<bool>() ? "All checks passed.\n" : "Some checks FAILED.\n");
  return md.str();
}

}  // namespace

json GoldenReport::to_json() const {
  json j = body;
  j["timing"] = {{"wall_seconds", wall_seconds}};
  return j;
}

GoldenReport reproduce_examples(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GoldenReport out;
  std::vector<Section> sections{section_a(seed), section_b(seed), section_c(seed), section_d(seed),
                                section_e(seed)};
  json secs = json::array();
  for (const auto& s : sections) {
    secs.push_back(s.to_json());
    out.all_passed = out.all_passed && s.passed();
  }
  out.body = {{"tool", "bsdecmp"}, {"version", BSDECMP_VERSION}, {"seed", seed}, {"sections", secs},
              {"all_passed", out.all_passed}};
  out.markdown = render_markdown(out.body);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_golden(const GoldenReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream js(dir / "report.json", std::ios::binary);
  std::ofstream md(dir / "summary.md", std::ios::binary);
  if (!js || !md) throw Error(ErrorCode::IoError, "cannot write golden report in " + dir.string());
  js << report.to_json().dump(2) << '\n';
  md << report.markdown;
}

}  // namespace bsdecmp
