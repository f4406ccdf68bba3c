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

// Generator-side conditions. With m = <y, q>^- > 0 the two-generator inequality
//
//   -4 m <q, g1(t, y + m q + y', z) - g2(t, y', z')>  <=  2 |(z - z')^T q|^2 + C m^2
//
// is checked by computing the smallest C at each probe. Growth of that C
// along y = b - eps u (b in q-perp, <u, q> > 0) as eps -> 0 separates
// generators for which no constant exists from those with a large one.
// Verdicts hold at the probe points only: "bounded" is evidence, "divergent"
// exhibits a failing family.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsdecmp/generator.hpp"
#include "bsdecmp/order_geometry.hpp"

namespace bsdecmp {

/// Shrink sequence y_j = base - eps_j direction with the other arguments fixed.
struct ShrinkSequence {
  double t = 0.0;
  Vector base;
  Vector direction;
  Vector y_prime;
  Matrix z;
  Matrix z_prime;
};

struct ProbeSchedule {
  /// Box for t and for every entry of y, y', z, z'.
  Region region;
  std::size_t random_probes = 10000;
  std::size_t shrink_directions = 32;
  /// eps_j = 2^-j, j = 0..shrink_levels.
  int shrink_levels = 20;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Checked in addition to the generated sequences.
  std::vector<ShrinkSequence> extra_sequences;
};

/// Minimal C at one point: 0 when <y, q> >= 0, otherwise
/// (-4 <q, g1(t, y + m q + y', z) - g2(t, y', z')> - 2 |(z - z')^T q|^2 / m) / m.
/// May be negative. Throws NonFinite.
double c_required(const Generator& g1, const Generator& g2, const Direction& q, double t, const Vector& y,
                  const Vector& y_prime, const Matrix& z, const Matrix& z_prime);

/// Componentwise form for q = e^i (zero-based i), written out coordinate by coordinate.
double c_required_component(const Generator& g1, const Generator& g2, std::size_t i, double t,
                            const Vector& y, const Vector& y_prime, const Matrix& z, const Matrix& z_prime);

/// c_required with the quadratic term summed as sum_ij q_i q_j <row_i, row_j> of z - z'.
double c_required_sum_form(const Generator& g1, const Generator& g2, const Direction& q, double t,
                           const Vector& y, const Vector& y_prime, const Matrix& z, const Matrix& z_prime);

/// sum_ij q_i q_j <row_i(dz), row_j(dz)> by double loop.
double quadratic_term_sum(const Vector& q, const Matrix& dz);

/// Single-generator form: (-4 <q, g(t, P_K(y), z)> - 2 |z^T q|^2 / m) / m, 0 off the binding set.
double c_required_viability(const Generator& g, const Direction& q, double t, const Vector& y, const Matrix& z);

struct ProbeRecord {
  std::size_t id = 0;
  /// Sequence index, or -1 for a random probe.
  long sequence = -1;
  double t = 0.0;
  double epsilon = 0.0;  // <y, q>^-
  double c = 0.0;
};

struct SequenceFit {
  std::size_t sequence = 0;
  bool fitted = false;  // false when some C in the fit window is <= 0
  double slope = 0.0;
  double r_squared = 0.0;
};

struct ProbeWitness {
  double t = 0.0;
  Vector y;
  Vector y_prime;
  Matrix z;
  Matrix z_prime;
  double c = 0.0;
};

struct ConditionReport {
  std::string condition;  // "condition_ii", "condition_v", "viability"
  Vector direction;
  std::size_t binding_probes = 0;
  std::size_t positive_probes = 0;
  double sup_c_required = 0.0;
  double mean_c_required = 0.0;
  ProbeWitness witness;
  std::optional<double> growth_exponent;
  std::vector<SequenceFit> fits;
  bool divergent = false;
  std::vector<ProbeRecord> probes;

  const char* classification() const noexcept { return divergent ? "divergent" : "bounded"; }
};

/// Slope threshold and fit quality for the divergent verdict.
inline constexpr double kDivergenceSlope = -0.5;
inline constexpr double kMinRSquared = 0.99;

ConditionReport check_condition_ii(const Generator& g1, const Generator& g2, const Direction& q,
                                   const ProbeSchedule& schedule);
/// Same probes as check_condition_ii with q = e^i; zero-based i.
ConditionReport check_condition_v(const Generator& g1, const Generator& g2, std::size_t i,
                                  const ProbeSchedule& schedule);
ConditionReport check_viability_condition(const Generator& g, const Direction& q, const ProbeSchedule& schedule);

struct PointWitness {
  double t = 0.0;
  Vector y;
  Matrix z;
};

struct OrderCheckReport {
  double min_margin = 0.0;  // min <q, g1 - g2>
  PointWitness witness;
  bool holds = true;
};

inline constexpr double kGeneratorTolerance = 1e-9;

/// min over samples of <q, g1(t, y, z) - g2(t, y, z)>; holds iff >= -1e-9.
OrderCheckReport check_necessary_order(const Generator& g1, const Generator& g2, const Direction& q,
                                       const Region& region, std::size_t samples, std::uint64_t seed);

struct EqualityReport {
  std::size_t component = 0;
  double max_gap = 0.0;
  PointWitness witness;
  bool equal = true;
};

/// max over samples of |g1_i - g2_i|; equal iff <= 1e-9. Zero-based i.
EqualityReport check_componentwise_equality(const Generator& g1, const Generator& g2, std::size_t i,
                                            const Region& region, std::size_t samples, std::uint64_t seed);

struct DependenceMask {
  std::size_t component = 0;
  std::vector<bool> depends_on_y;
  std::vector<bool> depends_on_z;  // row j of z
  double threshold = 1e-9;
  std::size_t samples = 0;

  /// g_i reads no y_j and no row z_j with j != i.
  bool diagonal() const;
};

/// Flags y_j (row z_j) when resampling it at a random base point moves g_i by
/// more than threshold * (1 + |g_i|). Sample k uses stream k, so raising
/// `samples` can only add flags.
DependenceMask detect_structure(const Generator& g, std::size_t i, const Region& region, std::size_t samples,
                                std::uint64_t seed);

}  // namespace bsdecmp
