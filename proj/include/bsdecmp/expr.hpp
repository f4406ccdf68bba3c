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

// Expression language for generators g(t, y, z) and terminal values xi(w).
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | primary
//   primary := number | variable | func '(' expr { ',' expr } ')' | '(' expr ')'
//   func    := abs | pos | neg | exp | sin | min | max | norm
//
// Variables: t, y<k>, z<k>_<j>, z<k><j> (single-digit k and j, n <= 9),
// z<k> (row k of z; a scalar only when d = 1, or as the argument of abs(),
// where it means the Euclidean norm of the row), and w<k> in terminal
// expressions. Indices are one-based. pos(x) = max(x, 0), neg(x) = max(-x, 0),
// norm(a, b, ...) = sqrt(a^2 + b^2 + ...).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsdecmp/common.hpp"

namespace bsdecmp::dsl {

enum class Op : std::uint8_t {
  Const,
  Time,
  StateY,    // y_index
  EntryZ,    // z_{index, column}
  RowNormZ,  // |row_index(z)|
  NoiseW,    // w_index
  Neg,
  Abs,
  Pos,
  NegPart,
  Exp,
  Sin,
  Add,
  Sub,
  Mul,
  Div,
  Min,
  Max,
  Norm,
};

enum class VarKind { Generator, Terminal };

struct VarContext {
  std::size_t n = 1;
  std::size_t d = 1;
  VarKind kind = VarKind::Generator;
};

/// Evaluation arguments. Pointers a given expression does not read may be null.
struct EvalPoint {
  double t = 0.0;
  const Vector* y = nullptr;
  const Matrix* z = nullptr;
  const Vector* w = nullptr;
};

/// Immutable expression tree with shared structure. Copies are cheap.
class Expr {
 public:
  struct Node;

  Expr();

  Op op() const noexcept;
  double value() const noexcept;
  /// Zero-based variable index (row for z).
  std::size_t index() const noexcept;
  /// Zero-based column for EntryZ.
  std::size_t column() const noexcept;
  const std::vector<Expr>& args() const noexcept;

  double eval(const EvalPoint& at) const;

  /// True when no variable (including t) occurs.
  bool is_constant() const;
  /// True when some y or z variable occurs.
  bool depends_on_state() const;

  friend bool same_node(const Expr& a, const Expr& b) noexcept { return a.node_ == b.node_; }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Expr make_node(Op, double, std::size_t, std::size_t, std::vector<Expr>);

  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  std::size_t index = 0;
  std::size_t column = 0;
  std::vector<Expr> args;
};

Expr make_node(Op op, double value, std::size_t index, std::size_t column, std::vector<Expr> args);

// Builders. Indices are zero-based.
Expr constant(double v);
Expr time_var();
Expr y_var(std::size_t k);
Expr z_var(std::size_t k, std::size_t j);
Expr z_row_norm(std::size_t k);
Expr w_var(std::size_t k);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr abs(const Expr& a);
Expr pos(const Expr& a);
Expr negpart(const Expr& a);
Expr exp(const Expr& a);
Expr sin(const Expr& a);
Expr min(const Expr& a, const Expr& b);
Expr max(const Expr& a, const Expr& b);
Expr norm(std::vector<Expr> parts);

/// Throws ParseError (SyntaxError, UnknownVariable, IndexOutOfRange).
Expr parse(std::string_view text, const VarContext& ctx);

/// Canonical text form; parse(print(e)) evaluates identically to e.
std::string print(const Expr& e);

/// Rebuilds `e` bottom-up, replacing every leaf for which `leaf` returns a value.
Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& leaf);

/// Replaces RowNormZ(k) by norm(z_{k,1}, ..., z_{k,d}).
Expr expand_row_norms(const Expr& e, std::size_t d);

/// Throws Error(IndexOutOfRange / UnknownVariable) when `e` uses a variable
/// outside `ctx`.
void check_context(const Expr& e, const VarContext& ctx);

/// Structural hints that the expression may violate a global Lipschitz bound
/// in (y, z): products of state-dependent factors, division by state, exp of state.
std::vector<std::string> lipschitz_warnings(const Expr& e);

/// Structural square-integrability certificate for Gaussian arguments: no
/// division by a variable and no exp of anything growing faster than linearly.
bool square_integrable_certified(const Expr& e);

}  // namespace bsdecmp::dsl
