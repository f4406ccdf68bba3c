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

#include "bsdecmp/order_geometry.hpp"

#include <cmath>
#include <string>

namespace bsdecmp {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Direction Direction::from_vector(const Vector& v) {
  if (v.size() == 0) throw Error(ErrorCode::ZeroVector, "direction must have n >= 1");
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, "direction has non-finite components");
  const double len = v.norm();
  if (!(len >= 1e-300)) throw Error(ErrorCode::ZeroVector, "direction vector is zero");
  return Direction(v / len);
}

Direction Direction::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadArgs, "uniform direction needs n >= 1");
  return Direction(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(n))));
}

Direction Direction::unit(std::size_t n, std::size_t i, bool negative) {
  if (i >= n) throw Error(ErrorCode::IndexOutOfRange, "unit direction index out of range");
  Vector q = Vector::Zero(static_cast<Eigen::Index>(n));
  q(static_cast<Eigen::Index>(i)) = negative ? -1.0 : 1.0;
  return Direction(std::move(q));
}

bool order_ge(const Direction& q, const Vector& a, const Vector& b) {
  require_same(static_cast<std::size_t>(a.size()), q.n(), "order_ge");
  require_same(static_cast<std::size_t>(b.size()), q.n(), "order_ge");
  return a.dot(q.q()) >= b.dot(q.q());
}

void HalfSpaceGeometry::check_dim(const Vector& y) const {
  require_same(static_cast<std::size_t>(y.size()), ambient_dim(), "half-space geometry");
}

double HalfSpaceGeometry::inner(const Vector& y) const {
  check_dim(y);
  return y.head(static_cast<Eigen::Index>(dir_.n())).dot(dir_.q());
}

Vector HalfSpaceGeometry::project(const Vector& y) const {
  const double s = inner(y);
  Vector out = y;
  if (s < 0.0) out.head(static_cast<Eigen::Index>(dir_.n())) -= s * dir_.q();
  return out;
}

double HalfSpaceGeometry::dist(const Vector& y) const { return std::max(-inner(y), 0.0); }

SquaredDistanceHessian HalfSpaceGeometry::hess_sq_dist(const Vector& y) const {
  const double s = inner(y);
  if (std::abs(s) < 1e-14) {
    throw Error(ErrorCode::OnBoundary, "squared distance is not twice differentiable on the boundary");
  }
  const auto m = static_cast<Eigen::Index>(ambient_dim());
  const auto n = static_cast<Eigen::Index>(dir_.n());
  SquaredDistanceHessian out{Matrix::Zero(m, m), s < 0.0};
  if (out.active) out.h.topLeftCorner(n, n) = 2.0 * dir_.q() * dir_.q().transpose();
  return out;
}

Vector project_halfspace(const HalfSpaceGeometry& geo, const Vector& y) { return geo.project(y); }
double dist_halfspace(const HalfSpaceGeometry& geo, const Vector& y) { return geo.dist(y); }
SquaredDistanceHessian hess_sq_dist(const HalfSpaceGeometry& geo, const Vector& y) {
  return geo.hess_sq_dist(y);
}

double quad_form(const SquaredDistanceHessian& hess, const Matrix& z) {
  require_same(static_cast<std::size_t>(z.rows()), static_cast<std::size_t>(hess.h.rows()), "quad_form");
  if (!hess.active) return 0.0;
  return (z.transpose() * hess.h * z).trace();
}

OracleProjection projection_oracle(const Direction& q, const Vector& y) {
  const auto n = static_cast<Eigen::Index>(q.n());
  require_same(static_cast<std::size_t>(y.size()), q.n(), "projection_oracle");
  if (n > 64) throw Error(ErrorCode::BadArgs, "projection_oracle supports n <= 64");
  if (!(y.dot(q.q()) < 0.0)) throw Error(ErrorCode::BadArgs, "projection_oracle needs <y, q> < 0");

  Matrix a = Matrix::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n).setIdentity();
  a.topRightCorner(n, 1) = -q.q();
  a.bottomLeftCorner(1, n) = q.q().transpose();
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = y;

  const Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "projection system is singular");
  const Vector sol = lu.solve(rhs);
  return OracleProjection{sol.head(n), sol(n)};
}

}  // namespace bsdecmp
