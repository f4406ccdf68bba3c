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


#include "bsdecmp/condition_checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsdecmp/error.hpp"
#include "parallel.hpp"

namespace bsdecmp {

namespace {

constexpr double kMinBinding = 1e-10;
constexpr std::uint64_t kSequenceStream = 0x100000000ull;

void check_pair(const Generator& g1, const Generator& g2) {
  if (g1.n() != g2.n() || g1.d() != g2.d()) {
    throw Error(ErrorCode::DimensionMismatch, "generators differ in (n, d)");
  }
}

Vector box_vector(std::mt19937_64& eng, Eigen::Index n, double bound) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(eng, -bound, bound);
  return v;
}

Matrix box_matrix(std::mt19937_64& eng, Eigen::Index n, Eigen::Index d, double bound) {
  Matrix m(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = uniform(eng, -bound, bound);
  }
  return m;
}

struct Probe {
  double t = 0.0;
  Vector y;
  Vector y_prime;
  Matrix z;
  Matrix z_prime;
};

// Binding probe: <y, q> < 0, bounded away from the boundary.
Probe random_probe(const Vector& q, std::size_t d, const Region& r, std::uint64_t seed, std::uint64_t k) {
  auto eng = stream_engine(seed, k);
  const auto n = q.size();
  const auto dd = static_cast<Eigen::Index>(d);
  Probe p;
  p.t = uniform(eng, r.t_lo, r.t_hi);
  do {
    p.y = box_vector(eng, n, r.y_bound);
    if (p.y.dot(q) > 0.0) p.y = -p.y;
  } while (std::abs(p.y.dot(q)) < kMinBinding);
  p.y_prime = box_vector(eng, n, r.y_bound);
  p.z = box_matrix(eng, n, dd, r.z_bound);
  p.z_prime = box_matrix(eng, n, dd, r.z_bound);
  return p;
}

// z - z' (or z alone when `single`) is projected so that its q-component
// vanishes, which removes the quadratic term and isolates the drift part.
ShrinkSequence random_sequence(const Vector& q, std::size_t d, const Region& r, bool single,
                               std::uint64_t seed, std::uint64_t s) {
  auto eng = stream_engine(seed, kSequenceStream + s);
  const auto n = q.size();
  const auto dd = static_cast<Eigen::Index>(d);
  const Matrix perp = Matrix::Identity(n, n) - q * q.transpose();
  ShrinkSequence seq;
  seq.t = uniform(eng, r.t_lo, r.t_hi);
  seq.base = perp * box_vector(eng, n, r.y_bound);
  Vector tilt = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) tilt(i) = standard_normal(eng);
  tilt = perp * tilt;
  const double len = tilt.norm();
  const double scale = uniform01(eng);
  if (len > 1e-12) tilt *= scale / len;
  seq.direction = q + tilt;
  seq.y_prime = box_vector(eng, n, r.y_bound);
  if (single) {
    seq.z = perp * box_matrix(eng, n, dd, r.z_bound);
    seq.z_prime = Matrix::Zero(n, dd);
  } else {
    seq.z_prime = box_matrix(eng, n, dd, r.z_bound);
    seq.z = seq.z_prime + perp * box_matrix(eng, n, dd, r.z_bound);
  }
  return seq;
}

enum class Form { Pair, Component, Single };

struct Evaluator {
  Form form;
  const Generator* g1;
  const Generator* g2;
  Direction q;
  std::size_t component = 0;

  double operator()(double t, const Vector& y, const Vector& yp, const Matrix& z, const Matrix& zp) const {
    switch (form) {
      case Form::Pair: return c_required(*g1, *g2, q, t, y, yp, z, zp);
      case Form::Component: return c_required_component(*g1, *g2, component, t, y, yp, z, zp);
      case Form::Single: return c_required_viability(*g1, q, t, y, z);
    }
    return 0.0;
  }
};

SequenceFit fit_sequence(std::size_t id, const std::vector<double>& eps, const std::vector<double>& c,
                         std::size_t first) {
  SequenceFit fit;
  fit.sequence = id;
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t j = first; j < eps.size(); ++j) {
    if (!(c[j] > 0.0)) return fit;
    lx.push_back(std::log(eps[j]));
    ly.push_back(std::log(c[j]));
  }
  if (lx.size() < 2) return fit;
  const double m = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    mx += lx[j];
    my += ly[j];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sxx += (lx[j] - mx) * (lx[j] - mx);
    sxy += (lx[j] - mx) * (ly[j] - my);
    syy += (ly[j] - my) * (ly[j] - my);
  }
  fit.fitted = true;
  fit.slope = sxy / sxx;
  // A constant C is a perfect fit with slope 0.
  fit.r_squared = syy <= 1e-24 * std::max(1.0, my * my) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

ConditionReport run_checker(const Evaluator& eval, std::size_t n, std::size_t d, const ProbeSchedule& sched,
                            std::string name) {
  if (sched.shrink_levels < 1) throw Error(ErrorCode::BadArgs, "shrink_levels must be >= 1");
  ConditionReport rep;
  rep.condition = std::move(name);
  rep.direction = eval.q.q();
  const Vector& q = eval.q.q();
  const bool single = eval.form == Form::Single;

  std::vector<double> cvals(sched.random_probes);
  std::vector<Probe> kept(sched.random_probes);
  detail::parallel_for(sched.random_probes, sched.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      Probe p = random_probe(q, d, sched.region, sched.seed, k);
      cvals[k] = eval(p.t, p.y, p.y_prime, p.z, p.z_prime);
      kept[k] = std::move(p);
    }
  });

  double sum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t k = 0; k < cvals.size(); ++k) {
    const double m = std::max(-kept[k].y.dot(q), 0.0);
    rep.probes.push_back({k, -1, kept[k].t, m, cvals[k]});
    sum += cvals[k];
    if (cvals[k] > 0.0) ++rep.positive_probes;
    if (cvals[k] > best) {
      best = cvals[k];
      arg = k;
    }
  }
  rep.binding_probes = cvals.size();
  if (!cvals.empty()) {
    rep.mean_c_required = sum / static_cast<double>(cvals.size());
    rep.sup_c_required = std::max(best, 0.0);
    const Probe& w = kept[arg];
    rep.witness = {w.t, w.y, single ? Vector() : w.y_prime, w.z, single ? Matrix() : w.z_prime, best};
  }

  std::vector<ShrinkSequence> seqs;
  for (std::size_t s = 0; s < sched.shrink_directions; ++s) {
    seqs.push_back(random_sequence(q, d, sched.region, single, sched.seed, s));
  }
  for (const auto& s : sched.extra_sequences) {
    if (static_cast<std::size_t>(s.base.size()) != n || static_cast<std::size_t>(s.direction.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "shrink sequence does not match generator dimension");
    }
    seqs.push_back(s);
  }

  const auto levels = static_cast<std::size_t>(sched.shrink_levels) + 1;
  std::vector<double> eps(levels);
  for (std::size_t j = 0; j < levels; ++j) eps[j] = std::ldexp(1.0, -static_cast<int>(j));
  // The fit uses the finer half of the levels, where lower-order terms in eps have died out.
  const std::size_t first = levels / 2;

  std::vector<std::vector<double>> seq_c(seqs.size(), std::vector<double>(levels));
  detail::parallel_for(seqs.size(), sched.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const auto& sq = seqs[s];
      const Vector yp = sq.y_prime.size() ? sq.y_prime : Vector::Zero(static_cast<Eigen::Index>(n));
      const Matrix zp = sq.z_prime.size() ? sq.z_prime : Matrix::Zero(sq.z.rows(), sq.z.cols());
      for (std::size_t j = 0; j < levels; ++j) {
        const Vector y = sq.base - eps[j] * sq.direction;
        seq_c[s][j] = eval(sq.t, y, yp, sq.z, zp);
      }
    }
  });

  std::size_t id = rep.probes.size();
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    const double speed = seqs[s].direction.dot(q);
    for (std::size_t j = 0; j < levels; ++j) {
      rep.probes.push_back({id++, static_cast<long>(s), seqs[s].t, eps[j] * speed, seq_c[s][j]});
    }
    SequenceFit fit = fit_sequence(s, eps, seq_c[s], first);
    if (fit.fitted && fit.r_squared >= kMinRSquared) {
      if (!rep.growth_exponent || fit.slope < *rep.growth_exponent) rep.growth_exponent = fit.slope;
    }
    rep.fits.push_back(fit);
  }
  rep.divergent = rep.growth_exponent && *rep.growth_exponent <= kDivergenceSlope;
  return rep;
}

}  // namespace

double c_required(const Generator& g1, const Generator& g2, const Direction& q, double t, const Vector& y,
                  const Vector& y_prime, const Matrix& z, const Matrix& z_prime) {
  check_pair(g1, g2);
  const double s = y.dot(q.q());
  if (s >= 0.0) return 0.0;
  const double m = -s;
  const Vector shifted = y + m * q.q() + y_prime;
  const double drift = q.q().dot(g1.eval(t, shifted, z) - g2.eval(t, y_prime, z_prime));
  const double quad = ((z - z_prime).transpose() * q.q()).squaredNorm();
  return (-4.0 * drift - 2.0 * quad / m) / m;
}

double c_required_component(const Generator& g1, const Generator& g2, std::size_t i, double t,
                            const Vector& y, const Vector& y_prime, const Matrix& z, const Matrix& z_prime) {
  check_pair(g1, g2);
  if (i >= g1.n()) throw Error(ErrorCode::IndexOutOfRange, "component index out of range");
  const auto ii = static_cast<Eigen::Index>(i);
  const double yi = y(ii);
  if (yi >= 0.0) return 0.0;
  const double m = -yi;
  Vector shifted = y + y_prime;
  shifted(ii) = yi + m + y_prime(ii);
  const double gap = g1.eval_component(i, t, shifted, z) - g2.eval_component(i, t, y_prime, z_prime);
  if (!std::isfinite(gap)) throw Error(ErrorCode::NonFinite, "generator is not finite at probe");
  const double row = (z.row(ii) - z_prime.row(ii)).squaredNorm();
  return (-4.0 * gap - 2.0 * row / m) / m;
}

double quadratic_term_sum(const Vector& q, const Matrix& dz) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < dz.rows(); ++i) {
    for (Eigen::Index j = 0; j < dz.rows(); ++j) {
      double inner = 0.0;
      for (Eigen::Index c = 0; c < dz.cols(); ++c) inner += dz(i, c) * dz(j, c);
      total += q(i) * q(j) * inner;
    }
  }
  return total;
}

double c_required_sum_form(const Generator& g1, const Generator& g2, const Direction& q, double t,
                           const Vector& y, const Vector& y_prime, const Matrix& z, const Matrix& z_prime) {
  check_pair(g1, g2);
  const double s = y.dot(q.q());
  if (s >= 0.0) return 0.0;
  const double m = -s;
  const Vector shifted = y + m * q.q() + y_prime;
  const Vector gap = g1.eval(t, shifted, z) - g2.eval(t, y_prime, z_prime);
  double drift = 0.0;
  for (Eigen::Index i = 0; i < gap.size(); ++i) drift += q.q()(i) * gap(i);
  const double quad = quadratic_term_sum(q.q(), z - z_prime);
  return (-4.0 * drift - 2.0 * quad / m) / m;
}

double c_required_viability(const Generator& g, const Direction& q, double t, const Vector& y, const Matrix& z) {
  const double s = y.dot(q.q());
  if (s >= 0.0) return 0.0;
  const double m = -s;
  const double drift = q.q().dot(g.eval(t, y + m * q.q(), z));
  const double quad = (z.transpose() * q.q()).squaredNorm();
  return (-4.0 * drift - 2.0 * quad / m) / m;
}

ConditionReport check_condition_ii(const Generator& g1, const Generator& g2, const Direction& q,
                                   const ProbeSchedule& schedule) {
  check_pair(g1, g2);
  if (q.n() != g1.n()) throw Error(ErrorCode::DimensionMismatch, "direction does not match generator dimension");
  return run_checker(Evaluator{Form::Pair, &g1, &g2, q, 0}, g1.n(), g1.d(), schedule, "condition_ii");
}

ConditionReport check_condition_v(const Generator& g1, const Generator& g2, std::size_t i,
                                  const ProbeSchedule& schedule) {
  check_pair(g1, g2);
  if (i >= g1.n()) throw Error(ErrorCode::IndexOutOfRange, "component index out of range");
  return run_checker(Evaluator{Form::Component, &g1, &g2, Direction::unit(g1.n(), i), i}, g1.n(), g1.d(),
                     schedule, "condition_v");
}

ConditionReport check_viability_condition(const Generator& g, const Direction& q, const ProbeSchedule& schedule) {
  if (q.n() != g.n()) throw Error(ErrorCode::DimensionMismatch, "direction does not match generator dimension");
  return run_checker(Evaluator{Form::Single, &g, &g, q, 0}, g.n(), g.d(), schedule, "viability");
}

// ---------------------------------------------------------------------------

namespace {

PointWitness sample_point(const Region& r, std::size_t n, std::size_t d, std::uint64_t seed, std::uint64_t k) {
  auto eng = stream_engine(seed, k);
  PointWitness p;
  p.t = uniform(eng, r.t_lo, r.t_hi);
  p.y = box_vector(eng, static_cast<Eigen::Index>(n), r.y_bound);
  p.z = box_matrix(eng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), r.z_bound);
  return p;
}

}  // namespace

OrderCheckReport check_necessary_order(const Generator& g1, const Generator& g2, const Direction& q,
                                       const Region& region, std::size_t samples, std::uint64_t seed) {
  check_pair(g1, g2);
  if (q.n() != g1.n()) throw Error(ErrorCode::DimensionMismatch, "direction does not match generator dimension");
  OrderCheckReport rep;
  for (std::size_t k = 0; k < samples; ++k) {
    PointWitness p = sample_point(region, g1.n(), g1.d(), seed, k);
    const double m = q.q().dot(g1.eval(p.t, p.y, p.z) - g2.eval(p.t, p.y, p.z));
    if (k == 0 || m < rep.min_margin) {
      rep.min_margin = m;
      rep.witness = std::move(p);
    }
  }
  rep.holds = rep.min_margin >= -kGeneratorTolerance;
  return rep;
}

EqualityReport check_componentwise_equality(const Generator& g1, const Generator& g2, std::size_t i,
                                            const Region& region, std::size_t samples, std::uint64_t seed) {
  check_pair(g1, g2);
  if (i >= g1.n()) throw Error(ErrorCode::IndexOutOfRange, "component index out of range");
  EqualityReport rep;
  rep.component = i;
  for (std::size_t k = 0; k < samples; ++k) {
    PointWitness p = sample_point(region, g1.n(), g1.d(), seed, k);
    const double gap = std::abs(g1.eval_component(i, p.t, p.y, p.z) - g2.eval_component(i, p.t, p.y, p.z));
    if (!std::isfinite(gap)) throw Error(ErrorCode::NonFinite, "generator is not finite at sample");
    if (k == 0 || gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.witness = std::move(p);
    }
  }
  rep.equal = rep.max_gap <= kGeneratorTolerance;
  return rep;
}

bool DependenceMask::diagonal() const {
  for (std::size_t j = 0; j < depends_on_y.size(); ++j) {
    if (j != component && (depends_on_y[j] || depends_on_z[j])) return false;
  }
  return true;
}

DependenceMask detect_structure(const Generator& g, std::size_t i, const Region& region, std::size_t samples,
                                std::uint64_t seed) {
  if (i >= g.n()) throw Error(ErrorCode::IndexOutOfRange, "component index out of range");
  const std::size_t n = g.n();
  const auto nn = static_cast<Eigen::Index>(n);
  const auto dd = static_cast<Eigen::Index>(g.d());
  DependenceMask mask;
  mask.component = i;
  mask.depends_on_y.assign(n, false);
  mask.depends_on_z.assign(n, false);
  mask.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    PointWitness p = sample_point(region, n, g.d(), seed, k);
    auto eng = stream_engine(seed, kSequenceStream + k);
    const Vector y_alt = box_vector(eng, nn, region.y_bound);
    const Matrix z_alt = box_matrix(eng, nn, dd, region.z_bound);
    const double base = g.eval_component(i, p.t, p.y, p.z);
    const double limit = mask.threshold * (1.0 + std::abs(base));
    for (Eigen::Index j = 0; j < nn; ++j) {
      Vector y = p.y;
      y(j) = y_alt(j);
      if (std::abs(g.eval_component(i, p.t, y, p.z) - base) > limit) mask.depends_on_y[static_cast<std::size_t>(j)] = true;
      Matrix z = p.z;
      z.row(j) = z_alt.row(j);
      if (std::abs(g.eval_component(i, p.t, p.y, z) - base) > limit) mask.depends_on_z[static_cast<std::size_t>(j)] = true;
    }
  }
  return mask;
}

}  // namespace bsdecmp
