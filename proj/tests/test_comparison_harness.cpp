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


#include <cmath>

#include <gtest/gtest.h>

#include "bsdecmp/comparison_harness.hpp"
#include "bsdecmp/error.hpp"

namespace bsdecmp {
namespace {

const double kE1 = std::exp(1.0) - 1.0;

SchemeConfig scheme(SchemeType type, std::size_t steps) {
  SchemeConfig s;
  s.type = type;
  s.steps = steps;
  s.seed = 3;
  return s;
}

TEST(Doubled, SubstitutionAtPoint) {
  const Generator gbar = build_doubled_generator(builtin_generator("ex31_g1"), builtin_generator("ex31_g2"));
  EXPECT_EQ(gbar.n(), 4u);
  EXPECT_DOUBLE_EQ(gbar.mu(), 4.0 * std::sqrt(2.0));
  Vector y(4);
  y << 1.0, 0.0, 0.0, 2.0;
  const Vector out = gbar.eval(0.3, y, Matrix::Zero(4, 1));
  // g1(y1 + y2) - g2(y2) = (3, 0.3) - (1, 0.3).
  EXPECT_DOUBLE_EQ(out(0), 2.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
  EXPECT_DOUBLE_EQ(out(2), 1.0);
  EXPECT_DOUBLE_EQ(out(3), 0.3);
}

TEST(Doubled, EqualGeneratorsCancelAtZeroFirstBlock) {
  const Generator g = builtin_generator("ex32_g");
  const Generator gbar = build_doubled_generator(g, g);
  Vector y(4);
  y << 0.0, 0.0, 0.7, -1.2;
  Matrix z(4, 1);
  z << 0.0, 0.0, 2.0, -3.0;
  const Vector out = gbar.eval(0.0, y, z);
  EXPECT_DOUBLE_EQ(out(0), 0.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
  EXPECT_DOUBLE_EQ(out(3), 3.0);
}

TEST(Doubled, RowNormsExpandAcrossBlocks) {
  const Generator g = Generator::parse(1, 2, {"abs(z1)"}, 1.0);
  const Generator gbar = build_doubled_generator(g, g);
  Matrix z(2, 2);
  z << 1.0, 1.0, 2.0, 3.0;
  // |row(z1 + z2)| - |row(z2)| = 5 - sqrt(13).
  EXPECT_NEAR(gbar.eval(0.0, Vector::Zero(2), z)(0), 5.0 - std::sqrt(13.0), 1e-15);
}

TEST(Doubled, DimensionMismatch) {
  EXPECT_THROW(build_doubled_generator(builtin_generator("ex31_g1"), builtin_generator("zero")), Error);
}

TEST(Terminals, OrderedByConstruction) {
  const Direction q = Direction::from_vector((Vector(3) << 1.0, -2.0, 0.5).finished());
  const TerminalFn base = TerminalFn::parse(3, 1, {"w1", "sin(w1)", "0"});
  const auto pairs = sample_ordered_terminals(q, base, 20, 11);
  ASSERT_EQ(pairs.size(), 20u);
  for (const auto& p : pairs) {
    for (double w : {-3.0, -0.1, 0.0, 0.4, 2.5}) {
      const Vector wv = Vector::Constant(1, w);
      EXPECT_GE((p.xi1.eval(wv) - p.xi2.eval(wv)).dot(q.q()), -1e-12);
    }
  }
}

TEST(Terminals, SingleDirectionExample) {
  OrderedTerminalOptions opts;
  opts.orth_scale = 0.0;
  const auto pairs = sample_ordered_terminals(Direction::unit(2, 0), builtin_terminal("ex32_xi2"), 1, 1, opts);
  const Vector w = Vector::Constant(1, -1.0);
  const Vector d = pairs[0].xi1.eval(w) - pairs[0].xi2.eval(w);
  EXPECT_GE(d(0), 0.0);
  EXPECT_DOUBLE_EQ(d(1), 0.0);
}

TEST(Terminals, ComponentwiseOrdered) {
  const auto pairs = sample_componentwise_terminals(TerminalFn::parse(2, 1, {"w1", "-w1"}), 10, 4);
  for (const auto& p : pairs) {
    const Vector w = Vector::Constant(1, 0.8);
    EXPECT_TRUE(((p.xi1.eval(w) - p.xi2.eval(w)).array() >= 0.0).all());
  }
}

TEST(Comparison, CoupledPairViolatesOnOde) {
  const Generator g = builtin_generator("ex32_g");
  const std::vector<TerminalPair> pair{{builtin_terminal("ex32_xi1"), builtin_terminal("ex32_xi2")}};
  const ComparisonReport r =
      run_comparison(g, g, ComparisonOrder::component(2, 0), pair, 1.0, scheme(SchemeType::Ode, 64));
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.origin_margin[0], -kE1, 1e-6);
  EXPECT_EQ(r.witness.step, 0u);
  EXPECT_EQ(r.margins.size(), 65u);
}

TEST(Comparison, DiagonalGeneratorHolds) {
  const Generator g = Generator::parse(2, 1, {"y1", "y2"}, 1.0);
  const auto pairs = sample_ordered_terminals(Direction::unit(2, 0), TerminalFn::parse(2, 1, {"w1", "w1"}), 10, 2);
  const ComparisonReport r =
      run_comparison(g, g, ComparisonOrder::component(2, 0), pairs, 1.0, scheme(SchemeType::Tree, 8));
  EXPECT_TRUE(r.holds);
  EXPECT_GE(r.min_margin, -1e-9);
}

TEST(Comparison, Reflexive) {
  const Generator g = builtin_generator("ex32_g");
  const TerminalFn xi = TerminalFn::parse(2, 1, {"sin(w1)", "pos(w1)"});
  const ComparisonReport r = run_comparison(g, g, ComparisonOrder::along(Direction::uniform(2)), {{xi, xi}}, 1.0,
                                            scheme(SchemeType::Tree, 8));
  EXPECT_LE(std::abs(r.min_margin), 1e-12);
  for (const auto& m : r.margins) EXPECT_LE(std::abs(m.margin), 1e-12);
}

TEST(Comparison, MarginGrowsWithShift) {
  const Generator g = Generator::parse(2, 1, {"y1", "y2"}, 1.0);
  const Direction q = Direction::uniform(2);
  const TerminalFn base = TerminalFn::parse(2, 1, {"w1", "0"});
  OrderedTerminalOptions small;
  small.alpha_scale = 0.5;
  OrderedTerminalOptions large = small;
  large.alpha_scale = 2.0;
  const auto order = ComparisonOrder::along(q);
  const auto a = run_comparison(g, g, order, sample_ordered_terminals(q, base, 8, 5, small), 1.0,
                                scheme(SchemeType::Tree, 6));
  const auto b = run_comparison(g, g, order, sample_ordered_terminals(q, base, 8, 5, large), 1.0,
                                scheme(SchemeType::Tree, 6));
  for (std::size_t k = 0; k < a.trial_min.size(); ++k) EXPECT_GE(b.trial_min[k].margin, a.trial_min[k].margin);
}

TEST(Comparison, DirectionScaleDoesNotMatter) {
  const Generator g1 = builtin_generator("ex31_g1");
  const Generator g2 = builtin_generator("ex31_g2");
  const TerminalFn xi = TerminalFn::parse(2, 1, {"w1", "0"});
  const auto q1 = Direction::from_vector((Vector(2) << 1.0, 0.0).finished());
  const auto q2 = Direction::from_vector((Vector(2) << 2.0, 0.0).finished());
  const auto r1 = run_comparison(g1, g2, ComparisonOrder::along(q1), {{xi, xi}}, 1.0, scheme(SchemeType::Tree, 6));
  const auto r2 = run_comparison(g1, g2, ComparisonOrder::along(q2), {{xi, xi}}, 1.0, scheme(SchemeType::Tree, 6));
  EXPECT_EQ(r1.holds, r2.holds);
  EXPECT_EQ(r1.min_margin, r2.min_margin);
}

TEST(Comparison, LsmcToleranceIncludesStandardError) {
  const Generator g = Generator::parse(1, 1, {"-y1"}, 1.0);
  SchemeConfig s = scheme(SchemeType::Lsmc, 4);
  s.paths = 2000;
  const TerminalFn base = TerminalFn::parse(1, 1, {"w1"});
  const auto pairs = sample_ordered_terminals(Direction::unit(1, 0), base, 2, 8);
  const ComparisonReport r = run_comparison(g, g, ComparisonOrder::component(1, 0), pairs, 1.0, s);
  EXPECT_GT(r.tolerance, 1e-9);
  EXPECT_TRUE(r.holds);
}

TEST(Comparison, EmptyPairListHolds) {
  const Generator g = builtin_generator("zero");
  const ComparisonReport r = run_comparison(g, g, ComparisonOrder::component(1, 0), {}, 1.0,
                                            scheme(SchemeType::Tree, 2));
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.margins.empty());
}

TEST(Viability, ZeroGeneratorStaysInside) {
  const Direction q = Direction::unit(2, 0);
  const ViabilityReport r = run_viability(Generator::zero(2, 1), q, {TerminalFn::parse(2, 1, {"pos(w1)", "w1"})},
                                          1.0, scheme(SchemeType::Tree, 8));
  EXPECT_TRUE(r.holds);
  EXPECT_GE(r.min_margin, -1e-12);
}

TEST(Viability, InwardDriftAddsRemainingTime) {
  const Direction q = Direction::uniform(2);
  const double c = q.q()(0);
  const Generator g = Generator::parse(2, 1, {std::to_string(c), std::to_string(c)}, 0.0);
  const TerminalFn xi = TerminalFn::parse(2, 1, {"w1", "-w1"});
  const ViabilityReport r = run_viability(g, q, {xi}, 1.0, scheme(SchemeType::Tree, 5));
  EXPECT_TRUE(r.holds);
  for (const auto& m : r.margins) EXPECT_NEAR(m.margin, 1.0 - m.t, 1e-6);
}

TEST(Viability, OutwardDriftLeaves) {
  const Generator g = Generator::parse(1, 1, {"-1"}, 0.0);
  const ViabilityReport r = run_viability(g, Direction::unit(1, 0), {TerminalFn::parse(1, 1, {"0"})}, 1.0,
                                          scheme(SchemeType::Tree, 4));
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.min_margin, -1.0, 1e-12);
  EXPECT_EQ(r.witness.step, 0u);
}

TEST(Viability, TerminalOutsideIsRejected) {
  try {
    run_viability(Generator::zero(1, 1), Direction::unit(1, 0), {TerminalFn::parse(1, 1, {"w1"})}, 1.0,
                  scheme(SchemeType::Tree, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TerminalNotInK);
  }
}

TEST(DoubledConsistency, ZeroGenerators) {
  const Generator z = Generator::zero(2, 1);
  const double r = check_doubled_consistency(z, z, TerminalFn::parse(2, 1, {"w1", "1"}),
                                             TerminalFn::parse(2, 1, {"0", "w1"}), 1.0, scheme(SchemeType::Tree, 6));
  EXPECT_LE(r, 1e-12);
}

TEST(DoubledConsistency, ExamplePairsOnTreeAndOde) {
  const double tree = check_doubled_consistency(
      builtin_generator("ex31_g1"), builtin_generator("ex31_g2"), TerminalFn::parse(2, 1, {"pos(w1)", "w1"}),
      TerminalFn::parse(2, 1, {"0", "sin(w1)"}), 1.0, scheme(SchemeType::Tree, 8));
  EXPECT_LE(tree, 1e-8);
  const Generator g = builtin_generator("ex32_g");
  const double ode = check_doubled_consistency(g, g, builtin_terminal("ex32_xi1"), builtin_terminal("ex32_xi2"), 1.0,
                                               scheme(SchemeType::Ode, 32));
  EXPECT_LE(ode, 1e-8);
}

TEST(DoubledConsistency, FirstBlockMarginMatchesComparison) {
  const Generator g = builtin_generator("ex32_g");
  const TerminalFn xi1 = builtin_terminal("ex32_xi1");
  const TerminalFn xi2 = builtin_terminal("ex32_xi2");
  const SchemeConfig sc = scheme(SchemeType::Tree, 6);
  const Solution bar = solve(BsdeSpec(build_doubled_generator(g, g), build_doubled_terminal(xi1, xi2), 1.0), sc);
  const ComparisonReport r = run_comparison(g, g, ComparisonOrder::component(2, 0), {{xi1, xi2}}, 1.0, sc);
  EXPECT_NEAR(bar.y(0, 0)(0), r.origin_margin[0], 1e-10);
}

}  // namespace
}  // namespace bsdecmp
