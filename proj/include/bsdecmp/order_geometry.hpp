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

#pragma once

// Calculus for the order a >=_q b  <=>  <a, q> >= <b, q> and the half-space
// K = {y : <y, q> >= 0}: projection, distance, Hessian of the squared
// distance, and the viability inequality
//
//   4 <y - P_K(y), g(t, P_K(y), z)>  <=  <D^2 d_K^2(y) z, z> + C d_K^2(y).

#include <concepts>
#include <cstddef>
#include <utility>

#include "bsdecmp/common.hpp"
#include "bsdecmp/error.hpp"
#include "bsdecmp/generator.hpp"

namespace bsdecmp {

/// Unit vector defining the order. Normalized once, on construction.
class Direction {
 public:
  /// Throws Error(ZeroVector) when |v| < 1e-300.
  static Direction from_vector(const Vector& v);
  /// (1/sqrt(n), ..., 1/sqrt(n)).
  static Direction uniform(std::size_t n);
  /// Coordinate direction e^i (zero-based i); negative = true gives -e^i.
  static Direction unit(std::size_t n, std::size_t i, bool negative = false);

  std::size_t n() const noexcept { return static_cast<std::size_t>(q_.size()); }
  const Vector& q() const noexcept { return q_; }

 private:
  explicit Direction(Vector q) : q_(std::move(q)) {}
  Vector q_;
};

inline Direction make_direction(const Vector& v) { return Direction::from_vector(v); }
inline Direction uniform_direction(std::size_t n) { return Direction::uniform(n); }

/// True iff <a, q> >= <b, q>.
bool order_ge(const Direction& q, const Vector& a, const Vector& b);

struct SquaredDistanceHessian {
  Matrix h;
  bool active = false;
};

/// K = {y : <y, q> >= 0} in R^n, or the product K x R^n in R^(2n) where only
/// the first block is constrained.
class HalfSpaceGeometry {
 public:
  static HalfSpaceGeometry plain(Direction q) { return HalfSpaceGeometry(std::move(q), 1); }
  static HalfSpaceGeometry product(Direction q) { return HalfSpaceGeometry(std::move(q), 2); }

  const Direction& direction() const noexcept { return dir_; }
  /// Offset of the constrained block inside the ambient vector (always 0 here).
  std::size_t block_offset() const noexcept { return 0; }
  std::size_t ambient_dim() const noexcept { return dir_.n() * blocks_; }

  /// <y_block, q>.
  double inner(const Vector& y) const;
  Vector project(const Vector& y) const;
  double dist(const Vector& y) const;
  /// Throws Error(OnBoundary) when |<y_block, q>| < 1e-14.
  SquaredDistanceHessian hess_sq_dist(const Vector& y) const;

 private:
  HalfSpaceGeometry(Direction q, std::size_t blocks) : dir_(std::move(q)), blocks_(blocks) {}
  void check_dim(const Vector& y) const;

  Direction dir_;
  std::size_t blocks_;
};

Vector project_halfspace(const HalfSpaceGeometry& geo, const Vector& y);
double dist_halfspace(const HalfSpaceGeometry& geo, const Vector& y);
SquaredDistanceHessian hess_sq_dist(const HalfSpaceGeometry& geo, const Vector& y);

/// sum_ij H_ij <row_i(z), row_j(z)>.
double quad_form(const SquaredDistanceHessian& hess, const Matrix& z);

struct OracleProjection {
  Vector projection;
  double distance = 0.0;
};

/// Solves [I, -q; q^T, 0] (u, d) = (y, 0) by dense LU. Requires <y, q> < 0
/// and n <= 64. Independent of the closed form in HalfSpaceGeometry.
OracleProjection projection_oracle(const Direction& q, const Vector& y);

/// Any closed convex set exposing projection, distance and the Hessian of d^2.
template <class G>
concept ConvexSetGeometry = requires(const G& geo, const Vector& y) {
  { geo.project(y) } -> std::convertible_to<Vector>;
  { geo.dist(y) } -> std::convertible_to<double>;
  { geo.hess_sq_dist(y) } -> std::convertible_to<SquaredDistanceHessian>;
};

struct BsvpSides {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const noexcept { return lhs <= rhs; }
};

/// Both sides of the viability inequality at one point.
template <ConvexSetGeometry G>
BsvpSides bsvp_lhs_rhs(const G& geo, const Generator& g, double t, const Vector& y, const Matrix& z,
                       double c) {
  const Vector p = geo.project(y);
  const Vector gp = g.eval(t, p, z);
  const double dist = geo.dist(y);
  BsvpSides out;
  out.lhs = 4.0 * (y - p).dot(gp);
  out.rhs = quad_form(geo.hess_sq_dist(y), z) + c * dist * dist;
  return out;
}

}  // namespace bsdecmp
