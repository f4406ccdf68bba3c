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

#include "bsdecmp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsdecmp/error.hpp"

namespace bsdecmp {

using dsl::Expr;

namespace {

std::string dims_text(std::size_t n, std::size_t d) {
  return "(n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")";
}

void require_finite(const Vector& v, const std::string& label, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      std::ostringstream msg;
      msg << what << (label.empty() ? "" : " '" + label + "'") << " component " << (i + 1)
          << " evaluated to " << v(i);
      throw Error(ErrorCode::NonFinite, msg.str());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator

Generator::Generator(std::size_t n, std::size_t d, std::vector<Expr> components, double mu,
                     std::string label)
    : n_(n), d_(d), components_(std::move(components)), mu_(mu), label_(std::move(label)) {
  if (n_ == 0 || d_ == 0) throw Error(ErrorCode::BadArgs, "generator needs n >= 1 and d >= 1");
  if (components_.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "generator " + dims_text(n_, d_) + " has " +
                                                  std::to_string(components_.size()) + " components");
  }
  if (!(mu_ > 0.0) || !std::isfinite(mu_)) {
    throw Error(ErrorCode::BadArgs, "generator Lipschitz estimate must be positive and finite");
  }
  const dsl::VarContext ctx{n_, d_, dsl::VarKind::Generator};
  for (const auto& c : components_) dsl::check_context(c, ctx);
}

Generator Generator::parse(std::size_t n, std::size_t d, const std::vector<std::string>& components,
                           std::optional<double> mu, std::string label) {
  if (components.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n) +
                                                  " generator expressions, got " +
                                                  std::to_string(components.size()));
  }
  const dsl::VarContext ctx{n, d, dsl::VarKind::Generator};
  std::vector<Expr> exprs;
  exprs.reserve(n);
  for (const auto& text : components) exprs.push_back(dsl::parse(text, ctx));
  if (mu) return Generator(n, d, std::move(exprs), std::max(*mu, kMuFloor), std::move(label));
  Generator provisional(n, d, std::move(exprs), 1.0, std::move(label));
  return provisional.with_mu(estimate_lipschitz(provisional, Region{}, 8, 2000, 0));
}

Generator Generator::zero(std::size_t n, std::size_t d) {
  return Generator(n, d, std::vector<Expr>(n, dsl::constant(0.0)), kMuFloor, "zero");
}

Vector Generator::eval_unchecked(double t, const Vector& y, const Matrix& z) const {
  if (static_cast<std::size_t>(y.size()) != n_ || static_cast<std::size_t>(z.rows()) != n_ ||
      static_cast<std::size_t>(z.cols()) != d_) {
    throw Error(ErrorCode::DimensionMismatch, "generator " + dims_text(n_, d_) +
                                                  " evaluated with y of size " +
                                                  std::to_string(y.size()) + " and z " +
                                                  std::to_string(z.rows()) + "x" +
                                                  std::to_string(z.cols()));
  }
  const dsl::EvalPoint at{t, &y, &z, nullptr};
  Vector out(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) out(static_cast<Eigen::Index>(i)) = components_[i].eval(at);
  return out;
}

Vector Generator::eval(double t, const Vector& y, const Matrix& z) const {
  Vector out = eval_unchecked(t, y, z);
  require_finite(out, label_, "generator");
  return out;
}

double Generator::eval_component(std::size_t i, double t, const Vector& y, const Matrix& z) const {
  if (i >= n_) throw Error(ErrorCode::IndexOutOfRange, "generator component index out of range");
  const double v = components_[i].eval(dsl::EvalPoint{t, &y, &z, nullptr});
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFinite, "generator component " + std::to_string(i + 1) + " is not finite");
  }
  return v;
}

Generator Generator::with_mu(double mu) const {
  return Generator(n_, d_, components_, std::max(mu, kMuFloor), label_);
}

Generator Generator::with_label(std::string label) const {
  return Generator(n_, d_, components_, mu_, std::move(label));
}

// ---------------------------------------------------------------------------
// TerminalFn

TerminalFn::TerminalFn(std::size_t n, std::size_t d, std::vector<Expr> components, std::string label)
    : n_(n), d_(d), components_(std::move(components)), label_(std::move(label)) {
  if (n_ == 0 || d_ == 0) throw Error(ErrorCode::BadArgs, "terminal needs n >= 1 and d >= 1");
  if (components_.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "terminal " + dims_text(n_, d_) + " has " +
                                                  std::to_string(components_.size()) + " components");
  }
  const dsl::VarContext ctx{n_, d_, dsl::VarKind::Terminal};
  constant_ = true;
  square_integrable_ = true;
  for (const auto& c : components_) {
    dsl::check_context(c, ctx);
    constant_ = constant_ && c.is_constant();
    square_integrable_ = square_integrable_ && dsl::square_integrable_certified(c);
  }
}

TerminalFn TerminalFn::parse(std::size_t n, std::size_t d, const std::vector<std::string>& components,
                             std::string label) {
  if (components.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n) +
                                                  " terminal expressions, got " +
                                                  std::to_string(components.size()));
  }
  const dsl::VarContext ctx{n, d, dsl::VarKind::Terminal};
  std::vector<Expr> exprs;
  for (const auto& text : components) exprs.push_back(dsl::parse(text, ctx));
  return TerminalFn(n, d, std::move(exprs), std::move(label));
}

TerminalFn TerminalFn::constant(std::size_t d, const Vector& value, std::string label) {
  std::vector<Expr> exprs;
  for (Eigen::Index i = 0; i < value.size(); ++i) exprs.push_back(dsl::constant(value(i)));
  return TerminalFn(static_cast<std::size_t>(value.size()), d, std::move(exprs), std::move(label));
}

Vector TerminalFn::eval(const Vector& w) const {
  if (static_cast<std::size_t>(w.size()) != d_) {
    throw Error(ErrorCode::DimensionMismatch, "terminal " + dims_text(n_, d_) +
                                                  " evaluated with w of size " + std::to_string(w.size()));
  }
  const dsl::EvalPoint at{0.0, nullptr, nullptr, &w};
  Vector out(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) out(static_cast<Eigen::Index>(i)) = components_[i].eval(at);
  require_finite(out, label_, "terminal");
  return out;
}

// ---------------------------------------------------------------------------
// Lipschitz estimation

double estimate_lipschitz(const Generator& g, const Region& region, std::size_t t_samples,
                          std::size_t pair_samples, std::uint64_t seed) {
  if (t_samples == 0 || pair_samples < 1000) {
    throw Error(ErrorCode::BadArgs, "estimate_lipschitz needs t_samples >= 1 and pair_samples >= 1000");
  }
  if (!(region.t_hi >= region.t_lo) || !(region.y_bound >= 0.0) || !(region.z_bound >= 0.0) ||
      !std::isfinite(region.y_bound) || !std::isfinite(region.z_bound)) {
    throw Error(ErrorCode::BadArgs, "estimate_lipschitz needs a bounded region");
  }
  const auto n = static_cast<Eigen::Index>(g.n());
  const auto d = static_cast<Eigen::Index>(g.d());
  const Eigen::Index coords = n + n * d;

  // Unit coordinates in [-1, 1]^(n + n d); the first n are y, then z column-major.
  auto to_point = [&](const Vector& s, Vector& y, Matrix& z) {
    y = s.head(n) * region.y_bound;
    z = Eigen::Map<const Matrix>(s.data() + n, n, d) * region.z_bound;
  };

  double best = 0.0;
  Vector s1(coords), s2(coords), y1, y2;
  Matrix z1, z2;
  for (std::size_t ti = 0; ti < t_samples; ++ti) {
    const double t = region.t_lo + (region.t_hi - region.t_lo) * (static_cast<double>(ti) + 0.5) /
                                       static_cast<double>(t_samples);
    auto eng = stream_engine(seed, ti);
    for (std::size_t p = 0; p < pair_samples; ++p) {
      for (Eigen::Index c = 0; c < coords; ++c) s1(c) = uniform(eng, -1.0, 1.0);
      s2 = s1;
      switch (p % 4) {
        case 0:
          for (Eigen::Index c = 0; c < coords; ++c) s2(c) = uniform(eng, -1.0, 1.0);
          break;
        case 1:
          for (Eigen::Index c = 0; c < n; ++c) s2(c) = uniform(eng, -1.0, 1.0);
          break;
        case 2:
          for (Eigen::Index c = n; c < coords; ++c) s2(c) = uniform(eng, -1.0, 1.0);
          break;
        default: {
          const auto c = static_cast<Eigen::Index>(eng() % static_cast<std::uint64_t>(coords));
          s2(c) = uniform(eng, -1.0, 1.0);
        }
      }
      to_point(s1, y1, z1);
      to_point(s2, y2, z2);
      const double denom = (y1 - y2).norm() + (z1 - z2).norm();
      if (!(denom > 0.0)) continue;
      const Vector g1 = g.eval(t, y1, z1);
      const Vector g2 = g.eval(t, y2, z2);
      best = std::max(best, (g1 - g2).norm() / denom);
    }
  }
  return std::max(best * kLipschitzSafety, kMuFloor);
}

// ---------------------------------------------------------------------------
// Assumption scan

AssumptionReport validate_assumptions(const Generator& g, double horizon, std::size_t samples,
                                      std::uint64_t seed) {
  AssumptionReport rep;
  if (!(horizon > 0.0)) throw Error(ErrorCode::BadArgs, "horizon must be positive");
  for (const auto& c : g.components()) {
    for (auto& w : dsl::lipschitz_warnings(c)) rep.warnings.push_back(std::move(w));
  }

  const auto n = static_cast<Eigen::Index>(g.n());
  const auto d = static_cast<Eigen::Index>(g.d());
  constexpr std::size_t kGrid = 1024;
  constexpr int kBisections = 40;
  const Region box{};

  auto values_finite = [](const Vector& v) { return v.allFinite(); };

  // Base point 0 is the origin, which doubles as the (A3) boundedness scan.
  const std::size_t points = std::max<std::size_t>(samples, 1);
  for (std::size_t s = 0; s < points && rep.finite; ++s) {
    Vector y = Vector::Zero(n);
    Matrix z = Matrix::Zero(n, d);
    if (s > 0) {
      auto eng = stream_engine(seed, s);
      for (Eigen::Index i = 0; i < n; ++i) y(i) = uniform(eng, -box.y_bound, box.y_bound);
      for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = uniform(eng, -box.z_bound, box.z_bound);
    }
    std::vector<Vector> vals(kGrid + 1);
    for (std::size_t k = 0; k <= kGrid; ++k) {
      const double t = horizon * static_cast<double>(k) / static_cast<double>(kGrid);
      vals[k] = g.eval_unchecked(t, y, z);
      if (!values_finite(vals[k])) {
        rep.finite = false;
        if (s == 0) rep.bounded_at_origin = false;
        std::ostringstream msg;
        msg << "NonFinite: generator is not finite at t=" << t << (s == 0 ? " (y=0, z=0)" : "");
        rep.violations.push_back(msg.str());
        break;
      }
      if (s == 0) rep.sup_at_origin = std::max(rep.sup_at_origin, vals[k].norm());
    }
    if (!rep.finite) break;

    // Bisect the largest grid jump; a jump that survives refinement is a discontinuity.
    std::size_t worst = 0;
    double worst_jump = -1.0;
    for (std::size_t k = 0; k < kGrid; ++k) {
      const double jump = (vals[k + 1] - vals[k]).norm();
      if (jump > worst_jump) {
        worst_jump = jump;
        worst = k;
      }
    }
    double a = horizon * static_cast<double>(worst) / static_cast<double>(kGrid);
    double b = horizon * static_cast<double>(worst + 1) / static_cast<double>(kGrid);
    Vector ga = vals[worst], gb = vals[worst + 1];
    for (int it = 0; it < kBisections; ++it) {
      const double m = 0.5 * (a + b);
      const Vector gm = g.eval_unchecked(m, y, z);
      if (!values_finite(gm)) {
        rep.finite = false;
        rep.violations.push_back("NonFinite: generator is not finite near t=" + std::to_string(m));
        break;
      }
      if ((gm - ga).norm() >= (gb - gm).norm()) {
        b = m;
        gb = gm;
      } else {
        a = m;
        ga = gm;
      }
    }
    if (rep.finite && (gb - ga).norm() > 1e-6 * (1.0 + ga.norm())) {
      rep.continuous_in_t = false;
      std::ostringstream msg;
      msg << "discontinuity in t near t=" << a << " (jump " << (gb - ga).norm() << ")";
      rep.violations.push_back(msg.str());
      break;
    }
  }
  if (!std::isfinite(rep.sup_at_origin)) rep.bounded_at_origin = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

std::vector<double> parse_builtin_args(std::string_view name, std::string_view& base) {
  std::vector<double> args;
  const auto open = name.find('(');
  if (open == std::string_view::npos) {
    base = name;
    return args;
  }
  if (name.back() != ')') throw Error(ErrorCode::UnknownBuiltin, "malformed builtin '" + std::string(name) + "'");
  base = name.substr(0, open);
  std::string inner(name.substr(open + 1, name.size() - open - 2));
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    while (end && *end == ' ') ++end;
    if (item.empty() || end == item.c_str() || (end && *end != '\0')) {
      throw Error(ErrorCode::UnknownBuiltin, "bad argument '" + item + "' in builtin '" + std::string(name) + "'");
    }
    args.push_back(v);
  }
  return args;
}

std::size_t as_dim(double v, std::string_view name) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 64.0) {
    throw Error(ErrorCode::UnknownBuiltin, "dimension arguments of '" + std::string(name) + "' must be integers in 1..64");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

Builtin builtin(std::string_view name) {
  using namespace dsl;
  std::string_view base;
  const std::vector<double> args = parse_builtin_args(name, base);
  const double sqrt2 = std::sqrt(2.0);
  auto expect_args = [&](std::size_t count) {
    if (args.size() != count) {
      throw Error(ErrorCode::UnknownBuiltin, "builtin '" + std::string(base) + "' takes " +
                                                 std::to_string(count) + " argument(s)");
    }
  };

  if (base == "ex31_g1") {
    expect_args(0);
    return Generator(2, 1, {y_var(0) + y_var(1), time_var()}, sqrt2, "ex31_g1");
  }
  if (base == "ex31_g2") {
    expect_args(0);
    return Generator(2, 1, {y_var(0) + y_var(1) - constant(1.0), time_var()}, sqrt2, "ex31_g2");
  }
  if (base == "ex32_g") {
    expect_args(0);
    return Generator(2, 1, {y_var(0) + y_var(1), z_row_norm(1)}, sqrt2, "ex32_g");
  }
  if (base == "zero") {
    if (args.empty()) return Generator::zero(1, 1);
    expect_args(2);
    return Generator::zero(as_dim(args[0], base), as_dim(args[1], base));
  }
  if (base == "linear") {
    expect_args(3);
    const double a = args[0], b = args[1], c = args[2];
    return Generator(1, 1, {constant(a) * y_var(0) + constant(b) * z_var(0, 0) + constant(c)},
                     std::max(std::abs(a) + std::abs(b), kMuFloor), std::string(name));
  }
  if (base == "diag_demo") {
    expect_args(0);
    return Generator(2, 1, {y_var(0), sin(y_var(1)) + z_var(1, 0)}, 1.0, "diag_demo");
  }
  if (base == "ex32_xi1") {
    expect_args(0);
    return TerminalFn(2, 1, {constant(0.0), constant(0.0)}, "ex32_xi1");
  }
  if (base == "ex32_xi2") {
    expect_args(0);
    return TerminalFn(2, 1, {constant(0.0), constant(1.0)}, "ex32_xi2");
  }
  throw Error(ErrorCode::UnknownBuiltin, "unknown builtin '" + std::string(name) + "'");
}

Generator builtin_generator(std::string_view name) {
  auto b = builtin(name);
  if (auto* g = std::get_if<Generator>(&b)) return *g;
  throw Error(ErrorCode::UnknownBuiltin, "builtin '" + std::string(name) + "' is a terminal, not a generator");
}

TerminalFn builtin_terminal(std::string_view name) {
  auto b = builtin(name);
  if (auto* f = std::get_if<TerminalFn>(&b)) return *f;
  throw Error(ErrorCode::UnknownBuiltin, "builtin '" + std::string(name) + "' is a generator, not a terminal");
}

}  // namespace bsdecmp
