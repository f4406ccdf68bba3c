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

// Backward solvers for Y_t = xi + int_t^u g(s, Y_s, Z_s) ds - int_t^u Z_s dW_s.
//
// Three schemes share one time step. With E_k the conditional expectation
// given F_{t_k} and dW_k = W_{t_{k+1}} - W_{t_k}:
//
//   Z_k = E_k[Y_{k+1} dW_k^T] / dt
//   Y_k = E_k[Y_{k+1}] + dt * g(t_k, theta * Y_k + (1 - theta) * E_k[Y_{k+1}], Z_k)
//
// solved for Y_k by Picard iteration. theta = 1 is the implicit Euler step;
// the default theta = 2/3 keeps the scheme first order with a smaller error
// constant. The tree computes E_k exactly, LSMC by regression.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bsdecmp/common.hpp"
#include "bsdecmp/generator.hpp"

namespace bsdecmp {

class BsdeSpec {
 public:
  /// Throws DimensionMismatch when generator and terminal disagree, BadArgs for u <= 0.
  BsdeSpec(Generator generator, TerminalFn terminal, double horizon);

  std::size_t n() const noexcept { return generator_.n(); }
  std::size_t d() const noexcept { return generator_.d(); }
  double horizon() const noexcept { return horizon_; }
  const Generator& generator() const noexcept { return generator_; }
  const TerminalFn& terminal() const noexcept { return terminal_; }

 private:
  Generator generator_;
  TerminalFn terminal_;
  double horizon_;
};

struct TimeGrid {
  double horizon = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<double> nodes;

  double t(std::size_t k) const { return nodes.at(k); }
};

/// Uniform grid t_k = k u / N. Throws BadArgs unless u > 0 and 1 <= N <= 1e6.
TimeGrid build_grid(double u, std::size_t steps);

inline constexpr double kDefaultTheta = 2.0 / 3.0;

struct StepOptions {
  double theta = kDefaultTheta;
  double picard_tol = 1e-12;
  int picard_max_iter = 50;
};

struct PicardResult {
  Vector y;
  int iterations = 0;
};

/// Solves y = ybar + dt g(t, theta y + (1 - theta) ybar, z). Converged when the
/// update norm is <= picard_tol * max(1, |y|). Throws PicardDiverged.
PicardResult picard_step(const Generator& g, double t, double dt, const Vector& ybar, const Matrix& z,
                         const StepOptions& opts);

Vector evaluate_terminal(const TerminalFn& f, const Vector& w);

// ---------------------------------------------------------------------------

struct OdeSolution {
  TimeGrid grid;
  std::vector<Vector> y;  // y[k] at t_k
  Matrix z;               // identically zero, n x d
};

/// Classical RK4 for dY/dt = -g(t, Y, 0) backward from Y(u) = xi.
/// Throws NotDeterministic when the terminal depends on w.
OdeSolution solve_ode(const BsdeSpec& spec, const TimeGrid& grid);

// ---------------------------------------------------------------------------

/// Largest d * N the tree accepts: 2^(dN) terminal nodes.
inline constexpr std::size_t kMaxTreeLog2Nodes = 24;

/// Non-recombining tree with increments (+-sqrt(dt))^d. Node i at level k has
/// children i * 2^d + c, c in [0, 2^d); bit j of c set means dW_j = +sqrt(dt).
struct TreeSolution {
  TimeGrid grid;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<Matrix> y;  // y[k]: n x 2^(dk)
  std::vector<Matrix> z;  // z[k]: (n d) x 2^(dk), column-major n x d per node; k < N
  std::vector<Matrix> w;  // w[k]: d x 2^(dk)
  std::vector<int> picard_iters;  // per level k < N, max over nodes

  std::size_t level_size(std::size_t k) const { return static_cast<std::size_t>(y.at(k).cols()); }
  Vector y_at(std::size_t k, std::size_t node) const;
  /// At the terminal level the parent's Z is reported.
  Matrix z_at(std::size_t k, std::size_t node) const;
  Vector w_at(std::size_t k, std::size_t node) const;
};

/// Throws TooLarge when d N > 24, PicardDiverged.
TreeSolution solve_tree(const BsdeSpec& spec, const TimeGrid& grid, const StepOptions& opts = {});

// ---------------------------------------------------------------------------

struct LsmcOptions {
  std::size_t paths = 10000;
  int basis_degree = 2;
  std::uint64_t seed = 0;
  double ridge = 1e-8;
  std::size_t workers = 1;
  StepOptions step;
};

struct LsmcSolution {
  TimeGrid grid;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t paths = 0;
  int basis_degree = 0;
  std::uint64_t seed = 0;
  std::vector<Matrix> w;  // w[k]: d x M
  std::vector<Matrix> y;  // y[k]: n x M
  std::vector<Matrix> z;  // z[k]: (n d) x M, k < N
  /// coefficients[k]: basis x (n + n d); first n columns fit Y_{k+1}, the rest Y_{k+1} dW^T / dt.
  std::vector<Matrix> coefficients;
  /// Regression design at each level, kept for diagnostics: basis values per path (M x basis).
  std::vector<Matrix> design;
  Vector y0_std_error;

  Vector y0() const { return y.front().col(0); }
  Vector y_at(std::size_t k, std::size_t path) const;
  Matrix z_at(std::size_t k, std::size_t path) const;
};

/// Number of monomials of total degree <= degree in d variables.
std::size_t monomial_count(std::size_t d, int degree);

/// Throws BadArgs (M < 10 x basis, degree outside 1..3), IllConditioned, PicardDiverged.
LsmcSolution solve_lsmc(const BsdeSpec& spec, const TimeGrid& grid, const LsmcOptions& opts);

// ---------------------------------------------------------------------------

enum class SchemeType { Ode, Tree, Lsmc };

const char* to_string(SchemeType s) noexcept;
SchemeType scheme_from_string(const std::string& s);

struct SchemeConfig {
  SchemeType type = SchemeType::Tree;
  std::size_t steps = 8;
  std::size_t paths = 10000;
  int basis_degree = 2;
  double picard_tol = 1e-12;
  double theta = kDefaultTheta;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  StepOptions step_options() const { return StepOptions{theta, picard_tol, 50}; }
};

/// Scheme-independent read access to a grid solution.
class Solution {
 public:
  explicit Solution(OdeSolution s) : impl_(std::move(s)) {}
  explicit Solution(TreeSolution s) : impl_(std::move(s)) {}
  explicit Solution(LsmcSolution s) : impl_(std::move(s)) {}

  SchemeType type() const noexcept;
  const TimeGrid& grid() const noexcept;
  std::size_t n() const noexcept;
  std::size_t d() const noexcept;
  std::size_t steps() const noexcept { return grid().steps; }
  /// Nodes (tree), paths (LSMC) or 1 (ODE) at level k.
  std::size_t count(std::size_t k) const;
  Vector y(std::size_t k, std::size_t i) const;
  Matrix z(std::size_t k, std::size_t i) const;

  const OdeSolution* ode() const { return std::get_if<OdeSolution>(&impl_); }
  const TreeSolution* tree() const { return std::get_if<TreeSolution>(&impl_); }
  const LsmcSolution* lsmc() const { return std::get_if<LsmcSolution>(&impl_); }

 private:
  std::variant<OdeSolution, TreeSolution, LsmcSolution> impl_;
};

Solution solve(const BsdeSpec& spec, const SchemeConfig& scheme);

}  // namespace bsdecmp
