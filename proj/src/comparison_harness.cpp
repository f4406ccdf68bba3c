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


#include "bsdecmp/comparison_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bsdecmp/error.hpp"
#include "parallel.hpp"

namespace bsdecmp {

namespace {

constexpr double kExactTolerance = 1e-9;

using dsl::Expr;
using dsl::Op;

// Orthonormal basis of the orthogonal complement of q, as columns.
Matrix orthogonal_complement(const Vector& q) {
  const auto n = q.size();
  if (n == 1) return Matrix(1, 0);
  Eigen::HouseholderQR<Matrix> qr(q);
  const Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  return full.rightCols(n - 1);
}

Expr affine_in_w(const Expr& base, double c, double p, double s) {
  Expr out = base;
  if (c != 0.0) out = out + dsl::constant(c);
  if (p != 0.0) out = out + dsl::constant(p) * dsl::pos(dsl::w_var(0));
  if (s != 0.0) out = out + dsl::constant(s) * dsl::sin(dsl::w_var(0));
  return out;
}

SchemeConfig trial_scheme(const SchemeConfig& scheme, std::size_t trials) {
  SchemeConfig s = scheme;
  if (trials > 1) s.workers = 1;
  return s;
}

}  // namespace

ComparisonOrder ComparisonOrder::along(const Direction& q) {
  ComparisonOrder o;
  o.directions.push_back(q);
  std::ostringstream label;
  label << "q=(";
  for (Eigen::Index i = 0; i < q.q().size(); ++i) label << (i ? "," : "") << q.q()(i);
  label << ")";
  o.label = label.str();
  return o;
}

ComparisonOrder ComparisonOrder::component(std::size_t n, std::size_t i) {
  ComparisonOrder o;
  o.directions.push_back(Direction::unit(n, i));
  o.label = "e_" + std::to_string(i + 1);
  return o;
}

ComparisonOrder ComparisonOrder::all_components(std::size_t n) {
  ComparisonOrder o;
  for (std::size_t i = 0; i < n; ++i) o.directions.push_back(Direction::unit(n, i));
  o.label = "componentwise";
  return o;
}

double ComparisonOrder::margin(const Vector& diff) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& q : directions) m = std::min(m, diff.dot(q.q()));
  return m;
}

// ---------------------------------------------------------------------------

Generator build_doubled_generator(const Generator& g1, const Generator& g2) {
  if (g1.n() != g2.n() || g1.d() != g2.d()) {
    throw Error(ErrorCode::DimensionMismatch, "doubled generator needs generators of equal (n, d)");
  }
  const std::size_t n = g1.n();
  const std::size_t d = g1.d();

  auto shift_sum = [n](const Expr& leaf) -> std::optional<Expr> {
    switch (leaf.op()) {
      case Op::StateY: return dsl::y_var(leaf.index()) + dsl::y_var(n + leaf.index());
      case Op::EntryZ:
        return dsl::z_var(leaf.index(), leaf.column()) + dsl::z_var(n + leaf.index(), leaf.column());
      default: return std::nullopt;
    }
  };
  auto shift_second = [n](const Expr& leaf) -> std::optional<Expr> {
    switch (leaf.op()) {
      case Op::StateY: return dsl::y_var(n + leaf.index());
      case Op::EntryZ: return dsl::z_var(n + leaf.index(), leaf.column());
      case Op::RowNormZ: return dsl::z_row_norm(n + leaf.index());
      default: return std::nullopt;
    }
  };

  std::vector<Expr> comps;
  comps.reserve(2 * n);
  std::vector<Expr> second;
  for (std::size_t i = 0; i < n; ++i) second.push_back(dsl::substitute(g2.components()[i], shift_second));
  for (std::size_t i = 0; i < n; ++i) {
    const Expr first = dsl::substitute(dsl::expand_row_norms(g1.components()[i], d), shift_sum);
    comps.push_back(first - second[i]);
  }
  for (std::size_t i = 0; i < n; ++i) comps.push_back(second[i]);
  std::string label;
  if (!g1.label().empty() || !g2.label().empty()) label = "doubled(" + g1.label() + "," + g2.label() + ")";
  return Generator(2 * n, d, std::move(comps), 2.0 * g1.mu() + 2.0 * g2.mu(), label);
}

TerminalFn build_doubled_terminal(const TerminalFn& xi1, const TerminalFn& xi2) {
  if (xi1.n() != xi2.n() || xi1.d() != xi2.d()) {
    throw Error(ErrorCode::DimensionMismatch, "doubled terminal needs terminals of equal (n, d)");
  }
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < xi1.n(); ++i) comps.push_back(xi1.components()[i] - xi2.components()[i]);
  for (std::size_t i = 0; i < xi1.n(); ++i) comps.push_back(xi2.components()[i]);
  return TerminalFn(2 * xi1.n(), xi1.d(), std::move(comps));
}

std::vector<TerminalPair> sample_ordered_terminals(const Direction& q, const TerminalFn& base,
                                                   std::size_t count, std::uint64_t seed,
                                                   const OrderedTerminalOptions& opts) {
  if (q.n() != base.n()) throw Error(ErrorCode::DimensionMismatch, "direction and terminal differ in n");
  const Matrix perp = orthogonal_complement(q.q());
  const auto n = static_cast<Eigen::Index>(q.n());
  std::vector<TerminalPair> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto eng = stream_engine(seed, k);
    const double a0 = uniform(eng, 0.0, opts.alpha_scale);
    const double a1 = uniform(eng, 0.0, opts.alpha_scale);
    Vector c = a0 * q.q();
    Vector s = Vector::Zero(n);
    for (Eigen::Index b = 0; b < perp.cols(); ++b) {
      c += uniform(eng, -opts.orth_scale, opts.orth_scale) * perp.col(b);
      s += uniform(eng, -opts.orth_scale, opts.orth_scale) * perp.col(b);
    }
    const Vector p = a1 * q.q();
    std::vector<Expr> comps;
    for (Eigen::Index i = 0; i < n; ++i) {
      comps.push_back(affine_in_w(base.components()[static_cast<std::size_t>(i)], c(i), p(i), s(i)));
    }
    out.push_back({TerminalFn(base.n(), base.d(), std::move(comps), "xi1#" + std::to_string(k)), base});
  }
  return out;
}

std::vector<TerminalPair> sample_componentwise_terminals(const TerminalFn& base, std::size_t count,
                                                         std::uint64_t seed, const OrderedTerminalOptions& opts) {
  std::vector<TerminalPair> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto eng = stream_engine(seed, k);
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < base.n(); ++i) {
      const double a0 = uniform(eng, 0.0, opts.alpha_scale);
      const double a1 = uniform(eng, 0.0, opts.alpha_scale);
      comps.push_back(affine_in_w(base.components()[i], a0, a1, 0.0));
    }
    out.push_back({TerminalFn(base.n(), base.d(), std::move(comps), "xi1#" + std::to_string(k)), base});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct TrialResult {
  std::vector<MarginPoint> per_step;
  MarginPoint worst;
  double origin = 0.0;
  double std_error = 0.0;
};

TrialResult margins_of(const Solution& a, const Solution* b, const ComparisonOrder& order, std::size_t trial) {
  TrialResult r;
  const std::size_t steps = a.steps();
  r.per_step.resize(steps + 1);
  r.worst.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= steps; ++k) {
    MarginPoint best{trial, k, a.grid().t(k), 0, std::numeric_limits<double>::infinity()};
    const std::size_t count = a.count(k);
    for (std::size_t i = 0; i < count; ++i) {
      const Vector diff = b ? Vector(a.y(k, i) - b->y(k, i)) : a.y(k, i);
      const double m = order.margin(diff);
      if (m < best.margin) {
        best.node = i;
        best.margin = m;
      }
    }
    r.per_step[k] = best;
    if (best.margin < r.worst.margin) r.worst = best;
  }
  r.origin = r.per_step.front().margin;

  if (a.type() == SchemeType::Lsmc && steps >= 1) {
    const std::size_t count = a.count(1);
    double mean = 0.0;
    std::vector<double> vals(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Vector diff = b ? Vector(a.y(1, i) - b->y(1, i)) : a.y(1, i);
      vals[i] = order.margin(diff);
      mean += vals[i];
    }
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(std::max<std::size_t>(count - 1, 1));
    r.std_error = std::sqrt(var / static_cast<double>(count));
  }
  return r;
}

template <class Report>
void merge_trials(Report& report, std::vector<TrialResult>& results) {
  report.min_margin = 0.0;
  bool first = true;
  double se = 0.0;
  for (auto& r : results) {
    for (auto& p : r.per_step) report.margins.push_back(p);
    if (first || r.worst.margin < report.witness.margin) {
      report.witness = r.worst;
      first = false;
    }
    se = std::max(se, r.std_error);
  }
  if (!first) report.min_margin = report.witness.margin;
  report.tolerance = kExactTolerance + 3.0 * se;
  report.holds = report.min_margin >= -report.tolerance;
}

}  // namespace

ComparisonReport run_comparison(const Generator& g1, const Generator& g2, const ComparisonOrder& order,
                                const std::vector<TerminalPair>& pairs, double horizon,
                                const SchemeConfig& scheme) {
  if (g1.n() != g2.n() || g1.d() != g2.d()) {
    throw Error(ErrorCode::DimensionMismatch, "compared generators differ in (n, d)");
  }
  if (order.directions.empty() || order.n() != g1.n()) {
    throw Error(ErrorCode::DimensionMismatch, "order direction does not match generator dimension");
  }
  ComparisonReport report;
  report.order_label = order.label;
  for (const auto& q : order.directions) report.directions.push_back(q.q());
  report.scheme = scheme;
  report.horizon = horizon;

  const SchemeConfig inner = trial_scheme(scheme, pairs.size());
  std::vector<TrialResult> results(pairs.size());
  detail::parallel_for(pairs.size(), scheme.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Solution s1 = solve(BsdeSpec(g1, pairs[k].xi1, horizon), inner);
      const Solution s2 = solve(BsdeSpec(g2, pairs[k].xi2, horizon), inner);
      results[k] = margins_of(s1, &s2, order, k);
    }
  });
  for (const auto& r : results) {
    report.trial_min.push_back(r.worst);
    report.origin_margin.push_back(r.origin);
  }
  merge_trials(report, results);
  return report;
}

ViabilityReport run_viability(const Generator& g, const Direction& q, const std::vector<TerminalFn>& terminals,
                              double horizon, const SchemeConfig& scheme) {
  if (q.n() != g.n()) throw Error(ErrorCode::DimensionMismatch, "direction does not match generator dimension");
  constexpr double kSlack = 1e-12;
  for (std::size_t k = 0; k < terminals.size(); ++k) {
    const TerminalFn& xi = terminals[k];
    if (xi.n() != g.n() || xi.d() != g.d()) {
      throw Error(ErrorCode::DimensionMismatch, "terminal " + std::to_string(k) + " does not match generator");
    }
    auto eng = stream_engine(scheme.seed, 0x5EED0000ull + k);
    Vector w(static_cast<Eigen::Index>(xi.d()));
    const double scale = 3.0 * std::sqrt(horizon);
    for (std::size_t s = 0; s < kTerminalChecks; ++s) {
      for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = scale * standard_normal(eng);
      if (xi.eval(w).dot(q.q()) < -kSlack) {
        std::ostringstream msg;
        msg << "terminal " << k << " has <xi(w), q> < 0 at w = (" << w.transpose() << ")";
        throw Error(ErrorCode::TerminalNotInK, msg.str());
      }
    }
  }

  ViabilityReport report;
  report.direction = q.q();
  report.scheme = scheme;
  report.horizon = horizon;
  const ComparisonOrder order = ComparisonOrder::along(q);
  const SchemeConfig inner = trial_scheme(scheme, terminals.size());
  std::vector<TrialResult> results(terminals.size());
  detail::parallel_for(terminals.size(), scheme.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Solution s = solve(BsdeSpec(g, terminals[k], horizon), inner);
      const std::size_t last = s.steps();
      for (std::size_t i = 0; i < s.count(last); ++i) {
        if (s.y(last, i).dot(q.q()) < -kSlack) {
          throw Error(ErrorCode::TerminalNotInK,
                      "terminal " + std::to_string(k) + " leaves K at grid node " + std::to_string(i));
        }
      }
      results[k] = margins_of(s, nullptr, order, k);
    }
  });
  merge_trials(report, results);
  return report;
}

double check_doubled_consistency(const Generator& g1, const Generator& g2, const TerminalFn& xi1,
                                 const TerminalFn& xi2, double horizon, const SchemeConfig& scheme) {
  const Generator gbar = build_doubled_generator(g1, g2);
  const TerminalFn xibar = build_doubled_terminal(xi1, xi2);
  const Solution s1 = solve(BsdeSpec(g1, xi1, horizon), scheme);
  const Solution s2 = solve(BsdeSpec(g2, xi2, horizon), scheme);
  const Solution sb = solve(BsdeSpec(gbar, xibar, horizon), scheme);
  const auto n = static_cast<Eigen::Index>(g1.n());
  double residual = 0.0;
  for (std::size_t k = 0; k <= sb.steps(); ++k) {
    for (std::size_t i = 0; i < sb.count(k); ++i) {
      const Vector ybar = sb.y(k, i);
      const Vector y1 = s1.y(k, i);
      const Vector y2 = s2.y(k, i);
      residual = std::max(residual, (ybar.head(n) - (y1 - y2)).cwiseAbs().maxCoeff());
      residual = std::max(residual, (ybar.tail(n) - y2).cwiseAbs().maxCoeff());
    }
  }
  return residual;
}

}  // namespace bsdecmp
