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
#include "bsdecmp/order_geometry.hpp"

namespace bsdecmp {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TEST(Direction, NormalizesOnce) {
  const Direction q = Direction::from_vector(vec({3.0, 4.0}));
  EXPECT_NEAR(q.q()(0), 0.6, 1e-15);
  EXPECT_NEAR(q.q()(1), 0.8, 1e-15);
  EXPECT_NEAR(q.q().norm(), 1.0, 1e-15);
}

TEST(Direction, RejectsZero) {
  try {
    Direction::from_vector(Vector::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
}

TEST(Direction, UniformAndUnit) {
  const Direction u = Direction::uniform(4);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(u.q()(i), 0.5);
  const Direction e = Direction::unit(3, 1, true);
  EXPECT_EQ(e.q(), vec({0.0, -1.0, 0.0}));
  EXPECT_THROW(Direction::unit(3, 3), Error);
}

TEST(Order, TotalAndScaleInvariant) {
  const Direction q = Direction::from_vector(vec({1.0, 1.0}));
  const Direction q2 = Direction::from_vector(vec({2.0, 2.0}));
  const Vector a = vec({1.0, 0.0});
  const Vector b = vec({0.0, 1.0});
  EXPECT_TRUE(order_ge(q, a, b));
  EXPECT_TRUE(order_ge(q, b, a));
  EXPECT_EQ(order_ge(q, a, vec({0.0, 2.0})), order_ge(q2, a, vec({0.0, 2.0})));
  EXPECT_THROW(order_ge(q, vec({1.0}), b), Error);
}

TEST(HalfSpace, ProjectionExamples) {
  const auto geo = HalfSpaceGeometry::plain(Direction::unit(2, 0));
  EXPECT_EQ(geo.project(vec({-2.0, 5.0})), vec({0.0, 5.0}));
  EXPECT_DOUBLE_EQ(geo.dist(vec({-2.0, 5.0})), 2.0);
  EXPECT_EQ(geo.project(vec({3.0, -1.0})), vec({3.0, -1.0}));
  EXPECT_DOUBLE_EQ(geo.dist(vec({3.0, -1.0})), 0.0);
}

TEST(HalfSpace, HessianActiveAndInactive) {
  const Direction q = Direction::from_vector(vec({1.0, 2.0, 2.0}));
  const auto geo = HalfSpaceGeometry::plain(q);
  const auto in = geo.hess_sq_dist(vec({1.0, 0.0, 0.0}));
  EXPECT_FALSE(in.active);
  EXPECT_EQ(in.h.norm(), 0.0);
  const auto out = geo.hess_sq_dist(vec({-1.0, 0.0, 0.0}));
  EXPECT_TRUE(out.active);
  EXPECT_LT((out.h - 2.0 * q.q() * q.q().transpose()).norm(), 1e-15);
  EXPECT_THROW(geo.hess_sq_dist(vec({0.0, 1.0, -1.0})), Error);
}

TEST(HalfSpace, HessianMatchesFiniteDifferences) {
  const Direction q = Direction::from_vector(vec({0.3, -1.0, 0.5}));
  const auto geo = HalfSpaceGeometry::plain(q);
  auto d2 = [&](const Vector& y) { return geo.dist(y) * geo.dist(y); };
  const Vector y = vec({-1.0, 2.0, 0.1});
  const double h = 1e-4;
  const auto hess = geo.hess_sq_dist(y);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Vector pp = y, pm = y, mp = y, mm = y;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      const double fd = (d2(pp) - d2(pm) - d2(mp) + d2(mm)) / (4 * h * h);
      EXPECT_NEAR(hess.h(i, j), fd, 1e-6);
    }
  }
}

TEST(HalfSpace, ProductConstrainsFirstBlock) {
  const auto geo = HalfSpaceGeometry::product(Direction::unit(2, 1));
  EXPECT_EQ(geo.ambient_dim(), 4u);
  const Vector y = vec({1.0, -2.0, -7.0, -9.0});
  EXPECT_EQ(geo.project(y), vec({1.0, 0.0, -7.0, -9.0}));
  EXPECT_DOUBLE_EQ(geo.dist(y), 2.0);
  const auto hess = geo.hess_sq_dist(y);
  EXPECT_DOUBLE_EQ(hess.h(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(hess.h.bottomRightCorner(2, 2).norm(), 0.0);
}

TEST(HalfSpace, AgreesWithLinearSystemOracle) {
  std::mt19937_64 eng(123);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 6);
    Vector raw(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      raw(i) = standard_normal(eng);
      y(i) = 3.0 * standard_normal(eng);
    }
    const Direction q = Direction::from_vector(raw);
    if (y.dot(q.q()) >= 0.0) y = -y;
    if (y.dot(q.q()) > -1e-8) continue;
    const auto geo = HalfSpaceGeometry::plain(q);
    const OracleProjection o = projection_oracle(q, y);
    EXPECT_LT((geo.project(y) - o.projection).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(geo.dist(y), o.distance, 1e-9);
  }
}

TEST(QuadForm, EqualsSquaredNormOfZtq) {
  std::mt19937_64 eng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 5);
    const auto d = static_cast<Eigen::Index>(1 + trial % 3);
    Vector raw(n);
    for (Eigen::Index i = 0; i < n; ++i) raw(i) = standard_normal(eng);
    const Direction q = Direction::from_vector(raw);
    Matrix z(n, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = standard_normal(eng);
    const Vector y = -q.q();
    const double lhs = quad_form(hess_sq_dist(HalfSpaceGeometry::plain(q), y), z);
    EXPECT_NEAR(lhs, 2.0 * (z.transpose() * q.q()).squaredNorm(), 1e-12);
  }
}

TEST(Bsvp, SidesAtSimplePoint) {
  const Direction q = Direction::unit(1, 0);
  const auto geo = HalfSpaceGeometry::plain(q);
  const Generator g = Generator::parse(1, 1, {"-1"}, 0.0);
  Vector y(1);
  y << -0.5;
  Matrix z(1, 1);
  z << 0.0;
  // lhs = 4 <y - P y, g(P y)> = 4 (-0.5)(-1) = 2, rhs = C d^2 = C / 4.
  const BsvpSides s = bsvp_lhs_rhs(geo, g, 0.0, y, z, 8.0);
  EXPECT_DOUBLE_EQ(s.lhs, 2.0);
  EXPECT_DOUBLE_EQ(s.rhs, 2.0);
  EXPECT_TRUE(s.holds());
  EXPECT_FALSE(bsvp_lhs_rhs(geo, g, 0.0, y, z, 7.0).holds());
}

}  // namespace
}  // namespace bsdecmp
