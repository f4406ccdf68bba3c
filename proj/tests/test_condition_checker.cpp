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
#include <random>

#include <gtest/gtest.h>

#include "bsdecmp/condition_checker.hpp"
#include "bsdecmp/error.hpp"

namespace bsdecmp {
namespace {

ProbeSchedule small_schedule(std::uint64_t seed = 1) {
  ProbeSchedule s;
  s.random_probes = 2000;
  s.shrink_directions = 16;
  s.shrink_levels = 20;
  s.seed = seed;
  return s;
}

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

TEST(CRequired, PairFromExampleIsExact) {
  const Generator g1 = builtin_generator("ex31_g1");
  const Generator g2 = builtin_generator("ex31_g2");
  const Direction q = Direction::unit(2, 0);
  const Matrix z = Matrix::Zero(2, 1);
  for (int k = 0; k <= 20; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const double c = c_required(g1, g2, q, 0.5, vec2(-eps, -3.0), Vector::Zero(2), z, z);
    EXPECT_DOUBLE_EQ(c, 8.0 / eps) << k;
  }
}

TEST(CRequired, ZeroOffBindingSet) {
  const Generator g = builtin_generator("ex31_g1");
  const Matrix z = Matrix::Zero(2, 1);
  EXPECT_EQ(c_required(g, g, Direction::unit(2, 0), 0.0, vec2(0.0, -4.0), vec2(1.0, 1.0), z, z), 0.0);
  EXPECT_EQ(c_required(g, g, Direction::unit(2, 0), 0.0, vec2(2.0, -4.0), vec2(1.0, 1.0), z, z), 0.0);
}

TEST(CRequired, FormsAgree) {
  const Generator g1 = builtin_generator("ex32_g");
  const Generator g2 = Generator::parse(2, 2, {"sin(y1) - z2_1", "y1 * 0.3 + abs(z1)"}, 2.0);
  const Generator g1b = Generator::parse(2, 2, {"y1 + y2", "abs(z2)"}, 2.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    Vector qv(2);
    qv << u(rng), u(rng);
    if (qv.norm() < 0.1) continue;
    const Direction q = Direction::from_vector(qv);
    Vector y(2), yp(2);
    Matrix z(2, 2), zp(2, 2);
    y << u(rng), u(rng);
    yp << u(rng), u(rng);
    z << u(rng), u(rng), u(rng), u(rng);
    zp << u(rng), u(rng), u(rng), u(rng);
    const double a = c_required(g1b, g2, q, 0.4, y, yp, z, zp);
    const double b = c_required_sum_form(g1b, g2, q, 0.4, y, yp, z, zp);
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
  }
  (void)g1;
}

TEST(CRequired, ComponentFormMatchesUnitDirection) {
  const Generator g1 = Generator::parse(2, 1, {"y1 * y2 / (1 + y2 * y2)", "z2_1"}, 2.0);
  const Generator g2 = Generator::parse(2, 1, {"-abs(z1) + t", "y1"}, 2.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const std::size_t i = k % 2;
    Vector y(2), yp(2);
    Matrix z(2, 1), zp(2, 1);
    y << u(rng), u(rng);
    yp << u(rng), u(rng);
    z << u(rng), u(rng);
    zp << u(rng), u(rng);
    const double a = c_required(g1, g2, Direction::unit(2, i), 0.2, y, yp, z, zp);
    const double b = c_required_component(g1, g2, i, 0.2, y, yp, z, zp);
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(CRequired, QuadraticTermBruteForce) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    Vector q(3);
    q << u(rng), u(rng), u(rng);
    Matrix dz(3, 2);
    for (Eigen::Index r = 0; r < 3; ++r)
      for (Eigen::Index c = 0; c < 2; ++c) dz(r, c) = u(rng);
    const double expect = (dz.transpose() * q).squaredNorm();
    EXPECT_NEAR(quadratic_term_sum(q, dz), expect, 1e-14);
  }
}

TEST(CRequired, NonFiniteThrows) {
  const Generator g = Generator::parse(1, 1, {"1 / (y1 + 1)"}, 1.0);
  const Matrix z = Matrix::Zero(1, 1);
  EXPECT_THROW(c_required(g, g, Direction::unit(1, 0), 0.0, Vector::Constant(1, -1.0), Vector::Constant(1, -1.0),
                          z, z),
               Error);
}

TEST(ConditionII, CoupledPairDivergesAtRateOne) {
  ProbeSchedule s = small_schedule();
  ShrinkSequence seq;
  seq.t = 0.5;
  seq.base = vec2(0.0, -3.0);
  seq.direction = vec2(1.0, 0.0);
  seq.y_prime = Vector::Zero(2);
  seq.z = Matrix::Zero(2, 1);
  seq.z_prime = Matrix::Zero(2, 1);
  s.extra_sequences.push_back(seq);
  const ConditionReport r =
      check_condition_ii(builtin_generator("ex31_g1"), builtin_generator("ex31_g2"), Direction::unit(2, 0), s);
  EXPECT_TRUE(r.divergent);
  EXPECT_STREQ(r.classification(), "divergent");
  ASSERT_TRUE(r.growth_exponent.has_value());
  EXPECT_NEAR(*r.growth_exponent, -1.0, 0.05);
  EXPECT_EQ(r.binding_probes, s.random_probes);
  EXPECT_GT(r.sup_c_required, 0.0);
}

TEST(ConditionII, ZeroGeneratorsBounded) {
  const Generator z = Generator::zero(2, 2);
  const ConditionReport r = check_condition_ii(z, z, Direction::uniform(2), small_schedule());
  EXPECT_FALSE(r.divergent);
  EXPECT_EQ(r.sup_c_required, 0.0);
  EXPECT_EQ(r.positive_probes, 0u);
}

TEST(ConditionII, ScalarShiftIsBoundedByTwoMuSquared) {
  const Generator g = Generator::parse(1, 1, {"sin(y1) + z1_1"}, 1.0);
  const ConditionReport r = check_condition_ii(g, g, Direction::unit(1, 0), small_schedule(3));
  EXPECT_FALSE(r.divergent);
  EXPECT_LE(r.sup_c_required, 2.0 + 0.01);
  EXPECT_GT(r.sup_c_required, 0.0);
}

TEST(ConditionII, RejectsDimensionMismatch) {
  EXPECT_THROW(check_condition_ii(builtin_generator("ex31_g1"), Generator::zero(1, 1), Direction::unit(2, 0),
                                  small_schedule()),
               Error);
}

TEST(ConditionV, IdenticalToUnitDirection) {
  const Generator g = builtin_generator("ex32_g");
  for (std::size_t i = 0; i < 2; ++i) {
    const ConditionReport a = check_condition_v(g, g, i, small_schedule(5));
    const ConditionReport b = check_condition_ii(g, g, Direction::unit(2, i), small_schedule(5));
    ASSERT_EQ(a.probes.size(), b.probes.size());
    for (std::size_t k = 0; k < a.probes.size(); ++k) {
      EXPECT_LE(std::abs(a.probes[k].c - b.probes[k].c), 1e-12 * std::max(1.0, std::abs(b.probes[k].c)));
    }
    EXPECT_EQ(a.divergent, b.divergent);
    EXPECT_EQ(a.condition, "condition_v");
  }
}

TEST(ConditionV, CoupledComponentDivergesOtherBounded) {
  const Generator g = builtin_generator("ex32_g");
  EXPECT_TRUE(check_condition_v(g, g, 0, small_schedule(6)).divergent);
  EXPECT_FALSE(check_condition_v(g, g, 1, small_schedule(6)).divergent);
}

TEST(Viability, InwardDriftHasZeroSup) {
  const Direction q = Direction::uniform(2);
  const Generator g = Generator::parse(2, 1, {std::to_string(q.q()(0)), std::to_string(q.q()(1))}, 0.0);
  const ConditionReport r = check_viability_condition(g, q, small_schedule());
  EXPECT_FALSE(r.divergent);
  EXPECT_EQ(r.sup_c_required, 0.0);
}

TEST(Viability, OutwardDriftDiverges) {
  const Generator g = Generator::parse(2, 1, {"-1", "0"}, 0.0);
  const ConditionReport r = check_viability_condition(g, Direction::unit(2, 0), small_schedule());
  EXPECT_TRUE(r.divergent);
  ASSERT_TRUE(r.growth_exponent.has_value());
  EXPECT_NEAR(*r.growth_exponent, -1.0, 0.05);
}

TEST(Viability, RestoringDriftBounded) {
  const Generator g = Generator::parse(2, 1, {"-y1", "0"}, 1.0);
  const ConditionReport r = check_viability_condition(g, Direction::unit(2, 0), small_schedule());
  EXPECT_FALSE(r.divergent);
  EXPECT_EQ(r.condition, "viability");
}

TEST(Viability, FormulaAtPoint) {
  const Generator g = Generator::parse(1, 1, {"-1"}, 0.0);
  const Matrix z = Matrix::Zero(1, 1);
  EXPECT_DOUBLE_EQ(c_required_viability(g, Direction::unit(1, 0), 0.0, Vector::Constant(1, -0.5), z), 8.0);
  EXPECT_EQ(c_required_viability(g, Direction::unit(1, 0), 0.0, Vector::Constant(1, 0.5), z), 0.0);
}

TEST(Checker, DeterministicAcrossWorkers) {
  ProbeSchedule a = small_schedule(8);
  ProbeSchedule b = a;
  b.workers = 3;
  const Generator g = builtin_generator("ex32_g");
  const ConditionReport ra = check_condition_ii(g, g, Direction::uniform(2), a);
  const ConditionReport rb = check_condition_ii(g, g, Direction::uniform(2), b);
  ASSERT_EQ(ra.probes.size(), rb.probes.size());
  for (std::size_t k = 0; k < ra.probes.size(); ++k) EXPECT_EQ(ra.probes[k].c, rb.probes[k].c);
  EXPECT_EQ(ra.sup_c_required, rb.sup_c_required);
  EXPECT_EQ(ra.growth_exponent, rb.growth_exponent);
}

TEST(NecessaryOrder, ShiftedPair) {
  const Generator g1 = builtin_generator("ex31_g1");
  const Generator g2 = builtin_generator("ex31_g2");
  const OrderCheckReport ok = check_necessary_order(g1, g2, Direction::unit(2, 0), Region{}, 500, 1);
  EXPECT_TRUE(ok.holds);
  EXPECT_NEAR(ok.min_margin, 1.0, 1e-12);
  const OrderCheckReport bad = check_necessary_order(g2, g1, Direction::unit(2, 0), Region{}, 500, 1);
  EXPECT_FALSE(bad.holds);
  EXPECT_NEAR(bad.min_margin, -1.0, 1e-12);
}

TEST(Equality, ComponentGap) {
  const Generator g1 = builtin_generator("ex31_g1");
  const Generator g2 = builtin_generator("ex31_g2");
  const EqualityReport e0 = check_componentwise_equality(g1, g2, 0, Region{}, 200, 2);
  EXPECT_FALSE(e0.equal);
  EXPECT_NEAR(e0.max_gap, 1.0, 1e-12);
  const EqualityReport e1 = check_componentwise_equality(g1, g2, 1, Region{}, 200, 2);
  EXPECT_TRUE(e1.equal);
  EXPECT_EQ(e1.max_gap, 0.0);
}

TEST(Structure, DiagonalAndCoupled) {
  const Generator demo = builtin_generator("diag_demo");
  const DependenceMask m0 = detect_structure(demo, 0, Region{}, 64, 3);
  EXPECT_TRUE(m0.depends_on_y[0]);
  EXPECT_FALSE(m0.depends_on_y[1]);
  EXPECT_TRUE(m0.diagonal());
  const DependenceMask m1 = detect_structure(demo, 1, Region{}, 64, 3);
  EXPECT_TRUE(m1.depends_on_y[1]);
  EXPECT_TRUE(m1.depends_on_z[1]);
  EXPECT_FALSE(m1.depends_on_z[0]);
  EXPECT_TRUE(m1.diagonal());
  const DependenceMask c = detect_structure(builtin_generator("ex32_g"), 0, Region{}, 64, 3);
  EXPECT_TRUE(c.depends_on_y[1]);
  EXPECT_FALSE(c.diagonal());
}

TEST(Structure, MoreSamplesOnlyAddFlags) {
  const Generator g = Generator::parse(3, 1, {"y1 + 1e-3 * pos(y2 - 4.5)", "0", "z3_1"}, 1.0);
  const DependenceMask few = detect_structure(g, 0, Region{}, 4, 12);
  const DependenceMask many = detect_structure(g, 0, Region{}, 256, 12);
  for (std::size_t j = 0; j < 3; ++j) {
    if (few.depends_on_y[j]) EXPECT_TRUE(many.depends_on_y[j]);
    if (few.depends_on_z[j]) EXPECT_TRUE(many.depends_on_z[j]);
  }
  EXPECT_TRUE(many.depends_on_y[1]);
}

}  // namespace
}  // namespace bsdecmp
