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

// Two-BSDE comparison runs on shared randomness, single-BSDE viability runs,
// and the 2n-dimensional doubled system that turns a comparison into a
// viability question.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bsdecmp/bsde_solver.hpp"
#include "bsdecmp/generator.hpp"
#include "bsdecmp/order_geometry.hpp"

namespace bsdecmp {

/// Margin functional: min over `directions` of <Y1 - Y2, q>. A single
/// direction gives the order >=_q; all unit vectors give the componentwise order.
struct ComparisonOrder {
  std::vector<Direction> directions;
  std::string label;

  static ComparisonOrder along(const Direction& q);
  /// q = e^i, zero-based i.
  static ComparisonOrder component(std::size_t n, std::size_t i);
  static ComparisonOrder all_components(std::size_t n);

  std::size_t n() const { return directions.front().n(); }
  double margin(const Vector& diff) const;
};

/// Ordered pair xi1 >= xi2 (in the order it was built for).
struct TerminalPair {
  TerminalFn xi1;
  TerminalFn xi2;
};

/// g_bar on (2n, d): first block g1(t, y1 + y2, z1 + z2) - g2(t, y2, z2),
/// second block g2(t, y2, z2), mu = 2 mu1 + 2 mu2. Throws DimensionMismatch.
Generator build_doubled_generator(const Generator& g1, const Generator& g2);

/// (xi1 - xi2, xi2).
TerminalFn build_doubled_terminal(const TerminalFn& xi1, const TerminalFn& xi2);

struct OrderedTerminalOptions {
  /// Shift along q is a0 + a1 pos(w1) with a0, a1 uniform on [0, alpha_scale].
  double alpha_scale = 1.0;
  /// Orthogonal part: sum_b (c_b + s_b sin(w1)) v_b over a basis v_b of q-perp,
  /// c_b, s_b uniform on [-orth_scale, orth_scale].
  double orth_scale = 1.0;
};

/// xi2 = base, xi1 = base + alpha q + v with alpha >= 0 and <v, q> = 0 for every w.
std::vector<TerminalPair> sample_ordered_terminals(const Direction& q, const TerminalFn& base,
                                                   std::size_t count, std::uint64_t seed,
                                                   const OrderedTerminalOptions& opts = {});

/// Componentwise variant: xi1_i = base_i + alpha_i with every alpha_i >= 0.
std::vector<TerminalPair> sample_componentwise_terminals(const TerminalFn& base, std::size_t count,
                                                         std::uint64_t seed,
                                                         const OrderedTerminalOptions& opts = {});

/// Position of a margin value on the grid.
struct MarginPoint {
  std::size_t trial = 0;
  std::size_t step = 0;
  double t = 0.0;
  std::size_t node = 0;  // tree node or LSMC path; 0 for ODE
  double margin = 0.0;
};

struct ComparisonReport {
  std::string order_label;
  std::vector<Vector> directions;
  SchemeConfig scheme;
  double horizon = 0.0;
  double tolerance = 0.0;
  /// Minimum over nodes/paths for every (trial, step), trial-major.
  std::vector<MarginPoint> margins;
  /// Per trial: worst point over all times, and the margin at t = 0.
  std::vector<MarginPoint> trial_min;
  std::vector<double> origin_margin;
  MarginPoint witness;
  double min_margin = 0.0;
  bool holds = true;
};

/// Solves both BSDEs per pair on the same grid and tree/paths. Trials run on
/// scheme.workers threads. Tolerance is 1e-9 for exact schemes and
/// 1e-9 + 3 standard errors of the margin for LSMC.
ComparisonReport run_comparison(const Generator& g1, const Generator& g2, const ComparisonOrder& order,
                                const std::vector<TerminalPair>& pairs, double horizon,
                                const SchemeConfig& scheme);

struct ViabilityReport {
  Vector direction;
  SchemeConfig scheme;
  double horizon = 0.0;
  double tolerance = 0.0;
  std::vector<MarginPoint> margins;  // min of <Y, q> per (terminal, step)
  MarginPoint witness;
  double min_margin = 0.0;
  bool holds = true;
};

/// Number of w samples used to validate <xi(w), q> >= 0 before solving.
inline constexpr std::size_t kTerminalChecks = 4096;

/// Throws TerminalNotInK when some terminal leaves K at a sampled w or at a
/// tree leaf.
ViabilityReport run_viability(const Generator& g, const Direction& q, const std::vector<TerminalFn>& terminals,
                              double horizon, const SchemeConfig& scheme);

/// max over times and nodes of |Y_bar - (Y1 - Y2, Y2)|, all three BSDEs on one grid.
double check_doubled_consistency(const Generator& g1, const Generator& g2, const TerminalFn& xi1,
                                 const TerminalFn& xi2, double horizon, const SchemeConfig& scheme);

}  // namespace bsdecmp
