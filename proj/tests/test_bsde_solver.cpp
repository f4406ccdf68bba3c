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

#include "bsdecmp/bsde_solver.hpp"
#include "bsdecmp/error.hpp"

namespace bsdecmp {
namespace {

BsdeSpec spec(const std::vector<std::string>& g, const std::vector<std::string>& xi, std::size_t d = 1,
              double mu = 1.0) {
  return BsdeSpec(Generator::parse(g.size(), d, g, mu), TerminalFn::parse(xi.size(), d, xi), 1.0);
}

TEST(Grid, UniformNodes) {
  const TimeGrid g = build_grid(2.0, 4);
  EXPECT_DOUBLE_EQ(g.dt, 0.5);
  EXPECT_EQ(g.nodes.size(), 5u);
  EXPECT_DOUBLE_EQ(g.t(4), 2.0);
  EXPECT_THROW(build_grid(0.0, 4), Error);
  EXPECT_THROW(build_grid(1.0, 0), Error);
}

TEST(Spec, DimensionsMustAgree) {
  try {
    BsdeSpec(builtin_generator("ex32_g"), TerminalFn::parse(1, 1, {"w1"}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Picard, SolvesImplicitLinearStep) {
  // y = ybar + dt (-(theta y + (1 - theta) ybar)) has a closed form.
  const Generator g = Generator::parse(1, 1, {"-y1"}, 1.0);
  Vector ybar(1);
  ybar << 2.0;
  StepOptions opts;
  const double dt = 0.1;
  const PicardResult r = picard_step(g, 0.0, dt, ybar, Matrix::Zero(1, 1), opts);
  const double th = opts.theta;
  EXPECT_NEAR(r.y(0), 2.0 * (1 - dt * (1 - th)) / (1 + dt * th), 1e-12);
  EXPECT_GT(r.iterations, 1);
}

TEST(Picard, DivergesForStiffStep) {
  const Generator g = Generator::parse(1, 1, {"-100 * y1"}, 100.0);
  Vector ybar(1);
  ybar << 1.0;
  try {
    picard_step(g, 0.0, 1.0, ybar, Matrix::Zero(1, 1), StepOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PicardDiverged);
  }
}

TEST(Ode, LinearGrowthMatchesExponential) {
  const BsdeSpec s(Generator::parse(1, 1, {"y1"}, 1.0), TerminalFn::parse(1, 1, {"2"}), 1.0);
  const OdeSolution sol = solve_ode(s, build_grid(1.0, 64));
  EXPECT_NEAR(sol.y[0](0), 2.0 * std::exp(1.0), 1e-8);
  EXPECT_EQ(sol.z.norm(), 0.0);
}

TEST(Ode, RejectsRandomTerminal) {
  try {
    solve_ode(spec({"0"}, {"w1"}), build_grid(1.0, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDeterministic);
  }
}

TEST(Tree, MartingaleIsExact) {
  const TreeSolution sol = solve_tree(spec({"0"}, {"w1"}), build_grid(1.0, 6));
  for (std::size_t k = 0; k <= 6; ++k) {
    for (std::size_t i = 0; i < sol.level_size(k); ++i) {
      EXPECT_NEAR(sol.y_at(k, i)(0), sol.w_at(k, i)(0), 1e-12);
      EXPECT_NEAR(sol.z_at(k, i)(0, 0), 1.0, 1e-12);
    }
  }
  EXPECT_EQ(sol.level_size(3), 8u);
}

TEST(Tree, DriftInZIsExact) {
  // Y_t = W_t + b (u - t) solves the equation with g = b z and xi = W_u.
  const TreeSolution sol = solve_tree(spec({"0.75 * z1_1"}, {"w1"}), build_grid(1.0, 5));
  EXPECT_NEAR(sol.y_at(0, 0)(0), 0.75, 1e-12);
  EXPECT_NEAR(sol.y_at(2, 3)(0), sol.w_at(2, 3)(0) + 0.75 * 0.6, 1e-12);
}

TEST(Tree, TwoNoiseDimensions) {
  const TreeSolution sol = solve_tree(spec({"0"}, {"w1 * w2"}, 2), build_grid(1.0, 3));
  EXPECT_EQ(sol.level_size(3), 64u);
  EXPECT_NEAR(sol.y_at(0, 0)(0), 0.0, 1e-14);
  for (std::size_t i = 0; i < sol.level_size(1); ++i) {
    const Vector w = sol.w_at(1, i);
    EXPECT_NEAR(sol.y_at(1, i)(0), w(0) * w(1), 1e-12);
    EXPECT_NEAR(sol.z_at(1, i)(0, 0), w(1), 1e-12);
    EXPECT_NEAR(sol.z_at(1, i)(0, 1), w(0), 1e-12);
  }
}

TEST(Tree, ConvergesAtFirstOrder) {
  const double exact = std::exp(-1.0);
  const BsdeSpec s = spec({"-y1"}, {"w1 + 1"});
  const double e8 = std::abs(solve_tree(s, build_grid(1.0, 8)).y_at(0, 0)(0) - exact);
  const double e16 = std::abs(solve_tree(s, build_grid(1.0, 16)).y_at(0, 0)(0) - exact);
  EXPECT_LT(e16, 0.05);
  EXPECT_GE(e8 / e16, 1.6);
  EXPECT_LE(e8 / e16, 2.4);
}

TEST(Tree, RefusesHugeTrees) {
  try {
    solve_tree(spec({"0"}, {"w1 + w2 + w3"}, 3), build_grid(1.0, 9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(Lsmc, MatchesReferenceValue) {
  LsmcOptions opts;
  opts.paths = 20000;
  opts.seed = 7;
  const LsmcSolution sol = solve_lsmc(spec({"-y1"}, {"w1 + 1"}), build_grid(1.0, 16), opts);
  EXPECT_NEAR(sol.y0()(0), std::exp(-1.0), 0.1);
  EXPECT_GT(sol.y0_std_error(0), 0.0);
  EXPECT_LT(sol.y0_std_error(0), 0.05);
}

TEST(Lsmc, WorkerCountDoesNotChangeResults) {
  LsmcOptions a;
  a.paths = 3000;
  a.seed = 99;
  LsmcOptions b = a;
  b.workers = 3;
  const BsdeSpec s = spec({"sin(y1) + 0.5 * z1_1"}, {"pos(w1)"});
  const LsmcSolution sa = solve_lsmc(s, build_grid(1.0, 6), a);
  const LsmcSolution sb = solve_lsmc(s, build_grid(1.0, 6), b);
  for (std::size_t k = 0; k <= 6; ++k) EXPECT_EQ(sa.y[k], sb.y[k]);
}

TEST(Lsmc, SeedsChangePaths) {
  LsmcOptions a;
  a.paths = 1000;
  a.seed = 1;
  LsmcOptions b = a;
  b.seed = 2;
  const BsdeSpec s = spec({"0"}, {"w1"});
  EXPECT_NE(solve_lsmc(s, build_grid(1.0, 2), a).w[2], solve_lsmc(s, build_grid(1.0, 2), b).w[2]);
}

TEST(Lsmc, RejectsTooFewPaths) {
  LsmcOptions a;
  a.paths = 20;
  EXPECT_THROW(solve_lsmc(spec({"0"}, {"w1"}), build_grid(1.0, 2), a), Error);
}

TEST(Lsmc, MonomialCount) {
  EXPECT_EQ(monomial_count(1, 2), 3u);
  EXPECT_EQ(monomial_count(2, 2), 6u);
  EXPECT_EQ(monomial_count(3, 3), 20u);
}

TEST(Solution, UniformAccess) {
  SchemeConfig sc;
  sc.type = SchemeType::Tree;
  sc.steps = 2;
  const Solution s = solve(spec({"0"}, {"w1"}), sc);
  EXPECT_EQ(s.type(), SchemeType::Tree);
  EXPECT_EQ(s.count(2), 4u);
  EXPECT_EQ(s.n(), 1u);
  EXPECT_EQ(scheme_from_string("lsmc"), SchemeType::Lsmc);
  EXPECT_STREQ(to_string(SchemeType::Ode), "ode");
  EXPECT_THROW(scheme_from_string("euler"), Error);
}

}  // namespace
}  // namespace bsdecmp
