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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bsdecmp/common.hpp"
#include "bsdecmp/expr.hpp"

namespace bsdecmp {

/// Sampling box for (t, y, z). Bounds are symmetric: |y_i| <= y_bound,
/// |z_ij| <= z_bound, t in [t_lo, t_hi].
struct Region {
  double t_lo = 0.0;
  double t_hi = 1.0;
  double y_bound = 5.0;
  double z_bound = 5.0;
};

/// Minimum Lipschitz estimate; keeps Picard step checks away from division by zero.
inline constexpr double kMuFloor = 1e-6;
inline constexpr double kLipschitzSafety = 1.25;

/// n-vector of expressions in (t, y, z) plus a Lipschitz estimate mu.
class Generator {
 public:
  Generator(std::size_t n, std::size_t d, std::vector<dsl::Expr> components, double mu,
            std::string label = {});

  /// Parses one expression per component. When `mu` is absent it is estimated
  /// on the default Region.
  static Generator parse(std::size_t n, std::size_t d, const std::vector<std::string>& components,
                         std::optional<double> mu = std::nullopt, std::string label = {});

  static Generator zero(std::size_t n, std::size_t d);

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  double mu() const noexcept { return mu_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<dsl::Expr>& components() const noexcept { return components_; }

  /// Throws Error(NonFinite) if a component is NaN or infinite.
  Vector eval(double t, const Vector& y, const Matrix& z) const;
  /// Same without the finiteness check.
  Vector eval_unchecked(double t, const Vector& y, const Matrix& z) const;
  double eval_component(std::size_t i, double t, const Vector& y, const Matrix& z) const;

  Generator with_mu(double mu) const;
  Generator with_label(std::string label) const;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<dsl::Expr> components_;
  double mu_;
  std::string label_;
};

/// Terminal value xi = phi(W_u) as n expressions in w1..wd.
class TerminalFn {
 public:
  TerminalFn(std::size_t n, std::size_t d, std::vector<dsl::Expr> components, std::string label = {});

  static TerminalFn parse(std::size_t n, std::size_t d, const std::vector<std::string>& components,
                          std::string label = {});
  static TerminalFn constant(std::size_t d, const Vector& value, std::string label = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  bool constant_flag() const noexcept { return constant_; }
  /// Structural certificate that xi is square-integrable under Gaussian w.
  bool square_integrable() const noexcept { return square_integrable_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<dsl::Expr>& components() const noexcept { return components_; }

  /// Throws Error(NonFinite) / Error(DimensionMismatch).
  Vector eval(const Vector& w) const;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<dsl::Expr> components_;
  bool constant_;
  bool square_integrable_;
  std::string label_;
};

/// Largest sampled ratio |g(t,y,z) - g(t,y',z')| / (|y-y'| + |z-z'|_F) times
/// kLipschitzSafety, floored at kMuFloor. Deterministic in `seed`.
///
/// Pairs cycle through four perturbation modes (independent points, y only,
/// z only, one coordinate) since independent points alone rarely align with
/// the steepest direction. Samples are drawn in unit coordinates and scaled
/// to the box, so boxes with a common center share directions.
double estimate_lipschitz(const Generator& g, const Region& region, std::size_t t_samples,
                          std::size_t pair_samples, std::uint64_t seed);

struct AssumptionReport {
  bool finite = true;         // no NaN / inf on the scanned points
  bool continuous_in_t = true;
  bool bounded_at_origin = true;  // t -> g(t, 0, 0) bounded on [0, T]
  double sup_at_origin = 0.0;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool pass() const noexcept { return finite && continuous_in_t && bounded_at_origin; }
};

/// Refutation-only scan of continuity in t and boundedness of g(., 0, 0).
AssumptionReport validate_assumptions(const Generator& g, double horizon, std::size_t samples,
                                      std::uint64_t seed = 0);

using Builtin = std::variant<Generator, TerminalFn>;

/// Named fixtures: ex31_g1, ex31_g2, ex32_g, zero(n,d), linear(a,b,c),
/// diag_demo, and the terminals ex32_xi1, ex32_xi2. Throws UnknownBuiltin.
Builtin builtin(std::string_view name);
Generator builtin_generator(std::string_view name);
TerminalFn builtin_terminal(std::string_view name);

}  // namespace bsdecmp
