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

#include "bsdecmp/error.hpp"
#include "bsdecmp/generator.hpp"

namespace bsdecmp {
namespace {

TEST(Generator, ParseAndEvaluate) {
  const Generator g = Generator::parse(2, 1, {"y1 + y2", "abs(z2)"}, 2.0);
  Vector y(2);
  y << 1.0, 2.0;
  Matrix z(2, 1);
  z << 5.0, -3.0;
  const Vector out = g.eval(0.0, y, z);
  EXPECT_DOUBLE_EQ(out(0), 3.0);
  EXPECT_DOUBLE_EQ(out(1), 3.0);
  EXPECT_DOUBLE_EQ(g.mu(), 2.0);
}

TEST(Generator, ComponentCountMustMatch) {
  EXPECT_THROW(Generator::parse(2, 1, {"y1"}), Error);
}

TEST(Generator, NonFiniteIsReported) {
  const Generator g = Generator::parse(1, 1, {"1 / y1"}, 1.0);
  try {
    g.eval(0.0, Vector::Zero(1), Matrix::Zero(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(Generator, LipschitzEstimateOfLinearMap) {
  // |a y + b z| has Lipschitz constant max(|a|, |b|) in |dy| + |dz|.
  const Generator g = Generator::parse(1, 1, {"3 * y1 - 2 * z1"}, 0.0);
  const double mu = estimate_lipschitz(g, Region{}, 8, 2000, 1);
  EXPECT_GE(mu, 3.0);
  EXPECT_LE(mu, 3.0 * kLipschitzSafety + 1e-9);
}

TEST(Generator, LipschitzEstimateIsDeterministic) {
  const Generator g = builtin_generator("ex32_g");
  EXPECT_EQ(estimate_lipschitz(g, Region{}, 4, 1000, 5), estimate_lipschitz(g, Region{}, 4, 1000, 5));
}

TEST(Generator, ParseEstimatesMuWhenAbsent) {
  const Generator g = Generator::parse(1, 1, {"sin(y1) + z1"});
  EXPECT_GE(g.mu(), 1.0);
  EXPECT_LE(g.mu(), 1.0 * kLipschitzSafety + 1e-9);
}

TEST(Terminal, ConstantFlagAndEval) {
  const TerminalFn c = builtin_terminal("ex32_xi2");
  EXPECT_TRUE(c.constant_flag());
  Vector w(1);
  w << 0.7;
  EXPECT_DOUBLE_EQ(c.eval(w)(1), 1.0);
  const TerminalFn f = TerminalFn::parse(1, 1, {"pos(w1)"});
  EXPECT_FALSE(f.constant_flag());
  EXPECT_TRUE(f.square_integrable());
  EXPECT_DOUBLE_EQ(f.eval(w)(0), 0.7);
  EXPECT_THROW(f.eval(Vector::Zero(2)), Error);
}

TEST(Builtins, NamedFixtures) {
  const Generator g1 = builtin_generator("ex31_g1");
  const Generator g2 = builtin_generator("ex31_g2");
  Vector y(2);
  y << 1.0, 2.0;
  const Matrix z = Matrix::Zero(2, 1);
  EXPECT_DOUBLE_EQ(g1.eval(0.3, y, z)(0) - g2.eval(0.3, y, z)(0), 1.0);
  EXPECT_DOUBLE_EQ(g1.eval(0.3, y, z)(1), 0.3);
  const Generator lin = builtin_generator("linear(2, -1, 0.5)");
  Vector y1(1);
  y1 << 1.0;
  Matrix z1(1, 1);
  z1 << 4.0;
  EXPECT_DOUBLE_EQ(lin.eval(0, y1, z1)(0), 2.0 - 4.0 + 0.5);
  EXPECT_EQ(builtin_generator("zero(3, 2)").n(), 3u);
  try {
    builtin("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownBuiltin);
  }
}

TEST(Assumptions, ContinuousGeneratorPasses) {
  const AssumptionReport r = validate_assumptions(builtin_generator("ex31_g1"), 1.0, 256);
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(r.sup_at_origin, 1.0, 1e-9);
}

TEST(Assumptions, JumpInTimeIsFlagged) {
  const Generator g = Generator::parse(1, 1, {"pos(t - 0.5) / (t - 0.5)"}, 0.0);
  const AssumptionReport r = validate_assumptions(g, 1.0, 256);
  EXPECT_FALSE(r.pass());
}

}  // namespace
}  // namespace bsdecmp
