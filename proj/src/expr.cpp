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

#include "bsdecmp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "bsdecmp/error.hpp"

namespace bsdecmp::dsl {

namespace {

const Expr::Node& zero_node() {
  static const Expr::Node node{};
  return node;
}

std::size_t arity(Op op) {
  switch (op) {
    case Op::Const:
    case Op::Time:
    case Op::StateY:
    case Op::EntryZ:
    case Op::RowNormZ:
    case Op::NoiseW:
      return 0;
    case Op::Neg:
    case Op::Abs:
    case Op::Pos:
    case Op::NegPart:
    case Op::Exp:
    case Op::Sin:
      return 1;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Min:
    case Op::Max:
      return 2;
    case Op::Norm:
      return static_cast<std::size_t>(-1);
  }
  return 0;
}

bool is_leaf(Op op) { return arity(op) == 0; }

}  // namespace

Expr make_node(Op op, double value, std::size_t index, std::size_t column, std::vector<Expr> args) {
  auto node = std::make_shared<Expr::Node>();
  node->op = op;
  node->value = value;
  node->index = index;
  node->column = column;
  node->args = std::move(args);
  return Expr(std::move(node));
}

Expr::Expr() : node_(std::shared_ptr<const Node>(std::shared_ptr<const Node>{}, &zero_node())) {}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
std::size_t Expr::index() const noexcept { return node_->index; }
std::size_t Expr::column() const noexcept { return node_->column; }
const std::vector<Expr>& Expr::args() const noexcept { return node_->args; }

double Expr::eval(const EvalPoint& at) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Time: return at.t;
    case Op::StateY: return (*at.y)(static_cast<Eigen::Index>(n.index));
    case Op::EntryZ:
      return (*at.z)(static_cast<Eigen::Index>(n.index), static_cast<Eigen::Index>(n.column));
    case Op::RowNormZ: return at.z->row(static_cast<Eigen::Index>(n.index)).norm();
    case Op::NoiseW: return (*at.w)(static_cast<Eigen::Index>(n.index));
    case Op::Neg: return -n.args[0].eval(at);
    case Op::Abs: return std::abs(n.args[0].eval(at));
    case Op::Pos: return std::max(n.args[0].eval(at), 0.0);
    case Op::NegPart: return std::max(-n.args[0].eval(at), 0.0);
    case Op::Exp: return std::exp(n.args[0].eval(at));
    case Op::Sin: return std::sin(n.args[0].eval(at));
    case Op::Add: return n.args[0].eval(at) + n.args[1].eval(at);
    case Op::Sub: return n.args[0].eval(at) - n.args[1].eval(at);
    case Op::Mul: return n.args[0].eval(at) * n.args[1].eval(at);
    case Op::Div: return n.args[0].eval(at) / n.args[1].eval(at);
    case Op::Min: return std::min(n.args[0].eval(at), n.args[1].eval(at));
    case Op::Max: return std::max(n.args[0].eval(at), n.args[1].eval(at));
    case Op::Norm: {
      double s = 0.0;
      for (const auto& a : n.args) {
        const double v = a.eval(at);
        s += v * v;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

bool Expr::is_constant() const {
  if (op() == Op::Const) return true;
  if (is_leaf(op())) return false;
  return std::all_of(args().begin(), args().end(), [](const Expr& a) { return a.is_constant(); });
}

bool Expr::depends_on_state() const {
  switch (op()) {
    case Op::StateY:
    case Op::EntryZ:
    case Op::RowNormZ:
      return true;
    default:
      return std::any_of(args().begin(), args().end(),
                         [](const Expr& a) { return a.depends_on_state(); });
  }
}

Expr constant(double v) { return make_node(Op::Const, v, 0, 0, {}); }
Expr time_var() { return make_node(Op::Time, 0.0, 0, 0, {}); }
Expr y_var(std::size_t k) { return make_node(Op::StateY, 0.0, k, 0, {}); }
Expr z_var(std::size_t k, std::size_t j) { return make_node(Op::EntryZ, 0.0, k, j, {}); }
Expr z_row_norm(std::size_t k) { return make_node(Op::RowNormZ, 0.0, k, 0, {}); }
Expr w_var(std::size_t k) { return make_node(Op::NoiseW, 0.0, k, 0, {}); }

Expr operator+(const Expr& a, const Expr& b) { return make_node(Op::Add, 0.0, 0, 0, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make_node(Op::Sub, 0.0, 0, 0, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return make_node(Op::Mul, 0.0, 0, 0, {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return make_node(Op::Div, 0.0, 0, 0, {a, b}); }
Expr operator-(const Expr& a) { return make_node(Op::Neg, 0.0, 0, 0, {a}); }
Expr abs(const Expr& a) { return make_node(Op::Abs, 0.0, 0, 0, {a}); }
Expr pos(const Expr& a) { return make_node(Op::Pos, 0.0, 0, 0, {a}); }
Expr negpart(const Expr& a) { return make_node(Op::NegPart, 0.0, 0, 0, {a}); }
Expr exp(const Expr& a) { return make_node(Op::Exp, 0.0, 0, 0, {a}); }
Expr sin(const Expr& a) { return make_node(Op::Sin, 0.0, 0, 0, {a}); }
Expr min(const Expr& a, const Expr& b) { return make_node(Op::Min, 0.0, 0, 0, {a, b}); }
Expr max(const Expr& a, const Expr& b) { return make_node(Op::Max, 0.0, 0, 0, {a, b}); }
Expr norm(std::vector<Expr> parts) {
  if (parts.empty()) throw Error(ErrorCode::BadArgs, "norm() needs at least one argument");
  return make_node(Op::Norm, 0.0, 0, 0, std::move(parts));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { End, Number, Ident, Plus, Minus, Star, Slash, LParen, RParen, Comma };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token tok;
    tok.pos = i;
    switch (c) {
      case '+': tok.kind = Tok::Plus; ++i; break;
      case '-': tok.kind = Tok::Minus; ++i; break;
      case '*': tok.kind = Tok::Star; ++i; break;
      case '/': tok.kind = Tok::Slash; ++i; break;
      case '(': tok.kind = Tok::LParen; ++i; break;
      case ')': tok.kind = Tok::RParen; ++i; break;
      case ',': tok.kind = Tok::Comma; ++i; break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
          // from_chars does not take a leading '+' in the exponent; scan by hand.
          std::size_t j = i;
          while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
          if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
            if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
              while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
              j = k;
            }
          }
          std::string lit(s.substr(i, j - i));
          char* end = nullptr;
          const double v = std::strtod(lit.c_str(), &end);
          if (end != lit.c_str() + lit.size() || lit == ".") {
            throw ParseError(ErrorCode::SyntaxError, "malformed number '" + lit + "'", i);
          }
          tok.kind = Tok::Number;
          tok.number = v;
          tok.text = std::move(lit);
          i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
          std::size_t j = i;
          while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
          tok.kind = Tok::Ident;
          tok.text = std::string(s.substr(i, j - i));
          i = j;
        } else {
          throw ParseError(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", i);
        }
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::size_t to_index(std::string_view digits, std::size_t pos) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || p != digits.data() + digits.size()) {
    throw ParseError(ErrorCode::IndexOutOfRange, "index '" + std::string(digits) + "' out of range", pos);
  }
  return v;
}

bool is_function(std::string_view name) {
  return name == "abs" || name == "pos" || name == "neg" || name == "exp" || name == "sin" ||
         name == "min" || name == "max" || name == "norm";
}

class Parser {
 public:
  Parser(std::string_view text, const VarContext& ctx) : toks_(tokenize(text)), ctx_(ctx) {}

  Expr parse_all() {
    if (peek().kind == Tok::End) {
      throw ParseError(ErrorCode::SyntaxError, "empty expression", peek().pos);
    }
    Expr e = parse_expr();
    if (peek().kind != Tok::End) {
      throw ParseError(ErrorCode::SyntaxError, "unexpected '" + describe(peek()) + "'", peek().pos);
    }
    return e;
  }

 private:
  // A resolved z row reference, which is only a scalar when d = 1.
  struct RowRef {
    std::size_t row;
    std::size_t pos;
  };

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(cur_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(cur_++, toks_.size() - 1)]; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Number:
      case Tok::Ident: return t.text;
      case Tok::Plus: return "+";
      case Tok::Minus: return "-";
      case Tok::Star: return "*";
      case Tok::Slash: return "/";
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::Comma: return ",";
    }
    return "?";
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(ErrorCode::SyntaxError,
                       std::string("expected ") + what + ", found '" + describe(peek()) + "'",
                       peek().pos);
    }
    ++cur_;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const bool plus = next().kind == Tok::Plus;
      Expr rhs = parse_term();
      lhs = plus ? lhs + rhs : lhs - rhs;
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const bool mul = next().kind == Tok::Star;
      Expr rhs = parse_unary();
      lhs = mul ? lhs * rhs : lhs / rhs;
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek().kind == Tok::Minus) {
      ++cur_;
      return -parse_unary();
    }
    if (peek().kind == Tok::Plus) {
      ++cur_;
      return parse_unary();
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number:
        ++cur_;
        return constant(tok.number);
      case Tok::LParen: {
        ++cur_;
        Expr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        if (is_function(tok.text)) return parse_call();
        return parse_variable();
      default:
        throw ParseError(ErrorCode::SyntaxError, "expected operand, found '" + describe(tok) + "'", tok.pos);
    }
  }

  Expr parse_call() {
    const Token name = next();
    expect(Tok::LParen, "'(' after function name");
    if (name.text == "abs" && peek().kind == Tok::Ident && peek(1).kind == Tok::RParen) {
      if (auto row = try_row(peek())) {
        cur_ += 2;
        return z_row_norm(row->row);
      }
    }
    std::vector<Expr> args;
    args.push_back(parse_expr());
    while (peek().kind == Tok::Comma) {
      ++cur_;
      args.push_back(parse_expr());
    }
    expect(Tok::RParen, "')'");

    const std::string& f = name.text;
    const std::size_t want = (f == "min" || f == "max") ? 2 : (f == "norm" ? 0 : 1);
    if (want != 0 && args.size() != want) {
      throw ParseError(ErrorCode::SyntaxError,
                       f + "() takes " + std::to_string(want) + " argument(s), got " +
                           std::to_string(args.size()),
                       name.pos);
    }
    if (f == "abs") return abs(args[0]);
    if (f == "pos") return pos(args[0]);
    if (f == "neg") return negpart(args[0]);
    if (f == "exp") return exp(args[0]);
    if (f == "sin") return sin(args[0]);
    if (f == "min") return min(args[0], args[1]);
    if (f == "max") return max(args[0], args[1]);
    return norm(std::move(args));
  }

  // Returns the row reference if `tok` names a bare z row ("z2", or "z12" when n >= 10).
  std::optional<RowRef> try_row(const Token& tok) const {
    const std::string& s = tok.text;
    if (s.size() < 2 || s[0] != 'z' || ctx_.kind != VarKind::Generator) return std::nullopt;
    const std::string_view digits = std::string_view(s).substr(1);
    if (!all_digits(digits)) return std::nullopt;
    if (ctx_.n <= 9 && digits.size() != 1) return std::nullopt;
    const std::size_t k = to_index(digits, tok.pos);
    check_range(k, ctx_.n, "z row", tok.pos);
    return RowRef{k - 1, tok.pos};
  }

  static void check_range(std::size_t k, std::size_t limit, const char* what, std::size_t pos) {
    if (k < 1 || k > limit) {
      throw ParseError(ErrorCode::IndexOutOfRange,
                       std::string(what) + " index " + std::to_string(k) + " outside 1.." +
                           std::to_string(limit),
                       pos);
    }
  }

  Expr parse_variable() {
    const Token tok = next();
    const std::string& s = tok.text;
    const bool gen = ctx_.kind == VarKind::Generator;
    auto unknown = [&]() {
      return ParseError(ErrorCode::UnknownVariable, "unknown identifier '" + s + "'", tok.pos);
    };

    if (s == "t") {
      if (!gen) throw unknown();
      return time_var();
    }
    const std::string_view rest = std::string_view(s).substr(1);
    switch (s[0]) {
      case 'y': {
        if (!gen || !all_digits(rest)) throw unknown();
        const std::size_t k = to_index(rest, tok.pos);
        check_range(k, ctx_.n, "y", tok.pos);
        return y_var(k - 1);
      }
      case 'w': {
        if (gen || !all_digits(rest)) throw unknown();
        const std::size_t k = to_index(rest, tok.pos);
        check_range(k, ctx_.d, "w", tok.pos);
        return w_var(k - 1);
      }
      case 'z': {
        if (!gen) throw unknown();
        const auto us = rest.find('_');
        if (us != std::string_view::npos) {
          const auto a = rest.substr(0, us);
          const auto b = rest.substr(us + 1);
          if (!all_digits(a) || !all_digits(b)) throw unknown();
          const std::size_t k = to_index(a, tok.pos);
          const std::size_t j = to_index(b, tok.pos);
          check_range(k, ctx_.n, "z row", tok.pos);
          check_range(j, ctx_.d, "z column", tok.pos);
          return z_var(k - 1, j - 1);
        }
        if (!all_digits(rest)) throw unknown();
        if (auto row = try_row(tok)) {
          if (ctx_.d != 1) {
            throw ParseError(ErrorCode::SyntaxError,
                             "row variable '" + s + "' is a vector when d > 1; use abs(" + s +
                                 ") or an entry z<k>_<j>",
                             tok.pos);
          }
          return z_var(row->row, 0);
        }
        if (rest.size() == 2) {
          const std::size_t k = static_cast<std::size_t>(rest[0] - '0');
          const std::size_t j = static_cast<std::size_t>(rest[1] - '0');
          check_range(k, ctx_.n, "z row", tok.pos);
          check_range(j, ctx_.d, "z column", tok.pos);
          return z_var(k - 1, j - 1);
        }
        throw ParseError(ErrorCode::IndexOutOfRange,
                         "ambiguous z index '" + s + "'; write z<k>_<j>", tok.pos);
      }
      default:
        throw unknown();
    }
  }

  std::vector<Token> toks_;
  VarContext ctx_;
  std::size_t cur_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? p : buf);
}

void print_to(const Expr& e, std::string& out) {
  auto unary = [&](const char* name) {
    out += name;
    out += '(';
    print_to(e.args()[0], out);
    out += ')';
  };
  auto infix = [&](const char* op) {
    out += '(';
    print_to(e.args()[0], out);
    out += op;
    print_to(e.args()[1], out);
    out += ')';
  };
  switch (e.op()) {
    case Op::Const:
      if (std::signbit(e.value())) {
        out += "(-";
        out += format_number(-e.value());
        out += ')';
      } else {
        out += format_number(e.value());
      }
      return;
    case Op::Time: out += 't'; return;
    case Op::StateY: out += 'y' + std::to_string(e.index() + 1); return;
    case Op::EntryZ:
      out += 'z' + std::to_string(e.index() + 1) + '_' + std::to_string(e.column() + 1);
      return;
    case Op::RowNormZ: out += "abs(z" + std::to_string(e.index() + 1) + ')'; return;
    case Op::NoiseW: out += 'w' + std::to_string(e.index() + 1); return;
    case Op::Neg:
      out += "(-";
      print_to(e.args()[0], out);
      out += ')';
      return;
    case Op::Abs: unary("abs"); return;
    case Op::Pos: unary("pos"); return;
    case Op::NegPart: unary("neg"); return;
    case Op::Exp: unary("exp"); return;
    case Op::Sin: unary("sin"); return;
    case Op::Add: infix(" + "); return;
    case Op::Sub: infix(" - "); return;
    case Op::Mul: infix(" * "); return;
    case Op::Div: infix(" / "); return;
    case Op::Min:
    case Op::Max:
      out += e.op() == Op::Min ? "min(" : "max(";
      print_to(e.args()[0], out);
      out += ", ";
      print_to(e.args()[1], out);
      out += ')';
      return;
    case Op::Norm:
      out += "norm(";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) out += ", ";
        print_to(e.args()[i], out);
      }
      out += ')';
      return;
  }
}

// Polynomial growth degree, or nullopt when unknown / super-polynomial.
std::optional<int> growth_degree(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Time:
      return 0;
    case Op::StateY:
    case Op::EntryZ:
    case Op::RowNormZ:
    case Op::NoiseW:
      return 1;
    case Op::Sin:
      return 0;
    case Op::Exp: {
      const auto d = growth_degree(e.args()[0]);
      if (d && *d == 0) return 0;
      return std::nullopt;
    }
    case Op::Mul: {
      const auto a = growth_degree(e.args()[0]);
      const auto b = growth_degree(e.args()[1]);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Op::Div: {
      if (!e.args()[1].is_constant()) return std::nullopt;
      return growth_degree(e.args()[0]);
    }
    default: {
      int deg = 0;
      for (const auto& a : e.args()) {
        const auto d = growth_degree(a);
        if (!d) return std::nullopt;
        deg = std::max(deg, *d);
      }
      return deg;
    }
  }
}

void collect_warnings(const Expr& e, std::vector<std::string>& out) {
  switch (e.op()) {
    case Op::Mul:
      if (e.args()[0].depends_on_state() && e.args()[1].depends_on_state()) {
        out.push_back("product of state-dependent factors: " + print(e));
      }
      break;
    case Op::Div:
      if (e.args()[1].depends_on_state()) {
        out.push_back("division by a state-dependent expression: " + print(e));
      } else if (!e.args()[1].is_constant()) {
        out.push_back("division by a time-dependent expression: " + print(e));
      }
      break;
    case Op::Exp:
      if (e.args()[0].depends_on_state()) {
        out.push_back("exponential of a state-dependent expression: " + print(e));
      }
      break;
    default:
      break;
  }
  for (const auto& a : e.args()) collect_warnings(a, out);
}

bool certified_rec(const Expr& e) {
  if (e.op() == Op::Div && !e.args()[1].is_constant()) return false;
  if (e.op() == Op::Exp) {
    const auto d = growth_degree(e.args()[0]);
    // exp of an affine Gaussian functional is lognormal, hence square-integrable.
    if (!d || *d > 1) return false;
  }
  return std::all_of(e.args().begin(), e.args().end(), certified_rec);
}

}  // namespace

Expr parse(std::string_view text, const VarContext& ctx) {
  if (ctx.n == 0 || ctx.d == 0) throw Error(ErrorCode::BadArgs, "variable context needs n >= 1 and d >= 1");
  return Parser(text, ctx).parse_all();
}

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& leaf) {
  if (e.args().empty()) {
    if (auto r = leaf(e)) return *r;
    return e;
  }
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(substitute(a, leaf));
  return make_node(e.op(), e.value(), e.index(), e.column(), std::move(args));
}

Expr expand_row_norms(const Expr& e, std::size_t d) {
  return substitute(e, [d](const Expr& leaf) -> std::optional<Expr> {
    if (leaf.op() != Op::RowNormZ) return std::nullopt;
    std::vector<Expr> parts;
    for (std::size_t j = 0; j < d; ++j) parts.push_back(z_var(leaf.index(), j));
    return norm(std::move(parts));
  });
}

void check_context(const Expr& e, const VarContext& ctx) {
  const bool gen = ctx.kind == VarKind::Generator;
  auto fail = [&](ErrorCode code, const std::string& what) {
    throw Error(code, what + " in expression " + print(e));
  };
  switch (e.op()) {
    case Op::Time:
      if (!gen) fail(ErrorCode::UnknownVariable, "t is not available in terminal expressions");
      break;
    case Op::StateY:
      if (!gen) fail(ErrorCode::UnknownVariable, "y is not available in terminal expressions");
      if (e.index() >= ctx.n) fail(ErrorCode::IndexOutOfRange, "y index out of range");
      break;
    case Op::EntryZ:
      if (!gen) fail(ErrorCode::UnknownVariable, "z is not available in terminal expressions");
      if (e.index() >= ctx.n || e.column() >= ctx.d) fail(ErrorCode::IndexOutOfRange, "z index out of range");
      break;
    case Op::RowNormZ:
      if (!gen) fail(ErrorCode::UnknownVariable, "z is not available in terminal expressions");
      if (e.index() >= ctx.n) fail(ErrorCode::IndexOutOfRange, "z row out of range");
      break;
    case Op::NoiseW:
      if (gen) fail(ErrorCode::UnknownVariable, "w is only available in terminal expressions");
      if (e.index() >= ctx.d) fail(ErrorCode::IndexOutOfRange, "w index out of range");
      break;
    default:
      break;
  }
  for (const auto& a : e.args()) check_context(a, ctx);
}

std::vector<std::string> lipschitz_warnings(const Expr& e) {
  std::vector<std::string> out;
  collect_warnings(e, out);
  return out;
}

bool square_integrable_certified(const Expr& e) { return certified_rec(e); }

}  // namespace bsdecmp::dsl
