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

#include "bsdecmp/bsde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsdecmp/error.hpp"
#include "parallel.hpp"

namespace bsdecmp {

BsdeSpec::BsdeSpec(Generator generator, TerminalFn terminal, double horizon)
    : generator_(std::move(generator)), terminal_(std::move(terminal)), horizon_(horizon) {
  if (generator_.n() != terminal_.n() || generator_.d() != terminal_.d()) {
    std::ostringstream msg;
    msg << "generator is (n=" << generator_.n() << ", d=" << generator_.d() << ") but terminal is (n="
        << terminal_.n() << ", d=" << terminal_.d() << ")";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw Error(ErrorCode::BadArgs, "horizon must be positive");
}

TimeGrid build_grid(double u, std::size_t steps) {
  if (!(u > 0.0) || !std::isfinite(u)) throw Error(ErrorCode::BadArgs, "grid horizon must be positive");
  if (steps < 1 || steps > 1000000) throw Error(ErrorCode::BadArgs, "grid step count must be in 1..1e6");
  TimeGrid g;
  g.horizon = u;
  g.steps = steps;
  g.dt = u / static_cast<double>(steps);
  g.nodes.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    g.nodes[k] = u * static_cast<double>(k) / static_cast<double>(steps);
  }
  g.nodes.back() = u;
  return g;
}

PicardResult picard_step(const Generator& g, double t, double dt, const Vector& ybar, const Matrix& z,
                         const StepOptions& opts) {
  PicardResult r{ybar, 0};
  const double theta = opts.theta;
  for (int it = 1; it <= opts.picard_max_iter; ++it) {
    const Vector arg = theta * r.y + (1.0 - theta) * ybar;
    Vector next = ybar + dt * g.eval_unchecked(t, arg, z);
    if (!next.allFinite()) break;
    const double update = (next - r.y).norm();
    r.y = std::move(next);
    r.iterations = it;
    if (update <= opts.picard_tol * std::max(1.0, r.y.norm())) return r;
  }
  std::ostringstream msg;
  msg << "Picard iteration did not converge at t=" << t << " within " << opts.picard_max_iter
      << " iterations (theta*dt*mu = " << theta * dt * g.mu() << "); refine the grid";
  throw Error(ErrorCode::PicardDiverged, msg.str());
}

Vector evaluate_terminal(const TerminalFn& f, const Vector& w) { return f.eval(w); }

// ---------------------------------------------------------------------------
// ODE

OdeSolution solve_ode(const BsdeSpec& spec, const TimeGrid& grid) {
  if (!spec.terminal().constant_flag()) {
    throw Error(ErrorCode::NotDeterministic, "ODE scheme needs a terminal value that does not depend on w");
  }
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto d = static_cast<Eigen::Index>(spec.d());
  OdeSolution sol;
  sol.grid = grid;
  sol.z = Matrix::Zero(n, d);
  sol.y.resize(grid.steps + 1);
  sol.y[grid.steps] = spec.terminal().eval(Vector::Zero(d));

  const Generator& g = spec.generator();
  const Matrix& z0 = sol.z;
  auto f = [&](double t, const Vector& y) { return g.eval(t, y, z0); };
  const double h = grid.dt;
  for (std::size_t k = grid.steps; k-- > 0;) {
    const double t1 = grid.t(k + 1);
    const double tm = t1 - 0.5 * h;
    const Vector& y1 = sol.y[k + 1];
    const Vector k1 = f(t1, y1);
    const Vector k2 = f(tm, y1 + 0.5 * h * k1);
    const Vector k3 = f(tm, y1 + 0.5 * h * k2);
    const Vector k4 = f(grid.t(k), y1 + h * k3);
    sol.y[k] = y1 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Tree

Vector TreeSolution::y_at(std::size_t k, std::size_t node) const {
  return y.at(k).col(static_cast<Eigen::Index>(node));
}

Matrix TreeSolution::z_at(std::size_t k, std::size_t node) const {
  const std::size_t branching = std::size_t{1} << d;
  if (k == grid.steps) {
    if (k == 0) return Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    --k;
    node /= branching;
  }
  return Eigen::Map<const Matrix>(z.at(k).col(static_cast<Eigen::Index>(node)).data(),
                                  static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
}

Vector TreeSolution::w_at(std::size_t k, std::size_t node) const {
  return w.at(k).col(static_cast<Eigen::Index>(node));
}

TreeSolution solve_tree(const BsdeSpec& spec, const TimeGrid& grid, const StepOptions& opts) {
  const std::size_t dn = spec.d() * grid.steps;
  if (spec.d() > kMaxTreeLog2Nodes || dn > kMaxTreeLog2Nodes) {
    throw Error(ErrorCode::TooLarge, "tree needs 2^(d N) = 2^" + std::to_string(dn) +
                                         " terminal nodes; the limit is 2^24");
  }
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto d = static_cast<Eigen::Index>(spec.d());
  const std::size_t branching = std::size_t{1} << spec.d();
  const double sq = std::sqrt(grid.dt);

  TreeSolution sol;
  sol.grid = grid;
  sol.n = spec.n();
  sol.d = spec.d();
  sol.y.resize(grid.steps + 1);
  sol.z.resize(grid.steps);
  sol.w.resize(grid.steps + 1);
  sol.picard_iters.assign(grid.steps, 0);

  sol.w[0] = Matrix::Zero(d, 1);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const auto parents = sol.w[k].cols();
    Matrix next(d, parents * static_cast<Eigen::Index>(branching));
    for (Eigen::Index p = 0; p < parents; ++p) {
      for (std::size_t c = 0; c < branching; ++c) {
        const Eigen::Index child = p * static_cast<Eigen::Index>(branching) + static_cast<Eigen::Index>(c);
        for (Eigen::Index j = 0; j < d; ++j) {
          next(j, child) = sol.w[k](j, p) + (((c >> j) & 1u) ? sq : -sq);
        }
      }
    }
    sol.w[k + 1] = std::move(next);
  }

  const Eigen::Index leaves = sol.w[grid.steps].cols();
  sol.y[grid.steps].resize(n, leaves);
  for (Eigen::Index i = 0; i < leaves; ++i) {
    sol.y[grid.steps].col(i) = spec.terminal().eval(sol.w[grid.steps].col(i));
  }

  const double inv_b = 1.0 / static_cast<double>(branching);
  Vector ybar(n);
  Matrix zk(n, d);
  for (std::size_t k = grid.steps; k-- > 0;) {
    const Matrix& ynext = sol.y[k + 1];
    const Eigen::Index count = sol.w[k].cols();
    sol.y[k].resize(n, count);
    sol.z[k].resize(n * d, count);
    int max_iter = 0;
    for (Eigen::Index p = 0; p < count; ++p) {
      ybar.setZero();
      zk.setZero();
      for (std::size_t c = 0; c < branching; ++c) {
        const auto yc = ynext.col(p * static_cast<Eigen::Index>(branching) + static_cast<Eigen::Index>(c));
        ybar += yc;
        for (Eigen::Index j = 0; j < d; ++j) {
          if ((c >> j) & 1u) zk.col(j) += yc;
          else zk.col(j) -= yc;
        }
      }
      ybar *= inv_b;
      zk *= inv_b / sq;
      const PicardResult r = picard_step(spec.generator(), grid.t(k), grid.dt, ybar, zk, opts);
      max_iter = std::max(max_iter, r.iterations);
      sol.y[k].col(p) = r.y;
      sol.z[k].col(p) = Eigen::Map<const Vector>(zk.data(), n * d);
    }
    sol.picard_iters[k] = max_iter;
  }
  return sol;
}

// ---------------------------------------------------------------------------
// LSMC

namespace {

std::vector<std::vector<int>> monomial_exponents(std::size_t d, int degree) {
  std::vector<std::vector<int>> out;
  // Graded order: all exponent tuples of total degree 0, then 1, ...
  for (int total = 0; total <= degree; ++total) {
    std::vector<int> e(d, 0);
    auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
      if (pos + 1 == d) {
        e[pos] = left;
        out.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[pos] = v;
        self(self, pos + 1, left - v);
      }
    };
    rec(rec, 0, total);
  }
  return out;
}

}  // namespace

std::size_t monomial_count(std::size_t d, int degree) { return monomial_exponents(d, degree).size(); }

Vector LsmcSolution::y_at(std::size_t k, std::size_t path) const {
  return y.at(k).col(static_cast<Eigen::Index>(path));
}

Matrix LsmcSolution::z_at(std::size_t k, std::size_t path) const {
  if (k == grid.steps) {
    if (k == 0) return Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    --k;
  }
  return Eigen::Map<const Matrix>(z.at(k).col(static_cast<Eigen::Index>(path)).data(),
                                  static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
}

LsmcSolution solve_lsmc(const BsdeSpec& spec, const TimeGrid& grid, const LsmcOptions& opts) {
  if (opts.basis_degree < 1 || opts.basis_degree > 3) {
    throw Error(ErrorCode::BadArgs, "LSMC basis degree must be 1, 2 or 3");
  }
  const auto exps = monomial_exponents(spec.d(), opts.basis_degree);
  const auto basis = static_cast<Eigen::Index>(exps.size());
  if (opts.paths < 10 * exps.size()) {
    throw Error(ErrorCode::BadArgs, "LSMC needs at least 10 paths per basis function (" +
                                        std::to_string(10 * exps.size()) + ")");
  }
  const auto n = static_cast<Eigen::Index>(spec.n());
  const auto d = static_cast<Eigen::Index>(spec.d());
  const auto m = static_cast<Eigen::Index>(opts.paths);
  const std::size_t steps = grid.steps;
  const double sq = std::sqrt(grid.dt);

  LsmcSolution sol;
  sol.grid = grid;
  sol.n = spec.n();
  sol.d = spec.d();
  sol.paths = opts.paths;
  sol.basis_degree = opts.basis_degree;
  sol.seed = opts.seed;
  sol.w.assign(steps + 1, Matrix::Zero(d, m));
  sol.y.resize(steps + 1);
  sol.z.resize(steps);
  sol.coefficients.resize(steps);
  sol.design.resize(steps);

  // Path p draws its increments from its own stream, step by step.
  detail::parallel_for(opts.paths, opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      auto eng = stream_engine(opts.seed, p);
      const auto col = static_cast<Eigen::Index>(p);
      for (std::size_t k = 0; k < steps; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) {
          sol.w[k + 1](j, col) = sol.w[k](j, col) + sq * standard_normal(eng);
        }
      }
    }
  });

  sol.y[steps].resize(n, m);
  for (Eigen::Index p = 0; p < m; ++p) sol.y[steps].col(p) = spec.terminal().eval(sol.w[steps].col(p));

  const StepOptions& step = opts.step;
  for (std::size_t k = steps; k-- > 0;) {
    const Matrix& ynext = sol.y[k + 1];
    const Matrix dw = sol.w[k + 1] - sol.w[k];

    // Design: monomials in the standardized state W_{t_k} / sqrt(t_k); constant at t_0.
    const bool origin = (k == 0);
    const Eigen::Index cols = origin ? 1 : basis;
    Matrix phi(m, cols);
    const double scale = origin ? 1.0 : 1.0 / std::sqrt(grid.t(k));
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index b = 0; b < cols; ++b) {
        double v = 1.0;
        for (Eigen::Index j = 0; j < d; ++j) {
          const double x = sol.w[k](j, p) * scale;
          for (int e = 0; e < exps[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)]; ++e) v *= x;
        }
        phi(p, b) = v;
      }
    }

    // Targets: Y_{k+1} and Y_{k+1} dW^T / dt, row p per path.
    Matrix target(m, n + n * d);
    target.leftCols(n) = ynext.transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        target.col(n + j * n + i) = (ynext.row(i).array() * dw.row(j).array() / grid.dt).transpose();
      }
    }

    const double inv_m = 1.0 / static_cast<double>(m);
    Matrix gram = phi.transpose() * phi * inv_m;
    gram.diagonal().array() += opts.ridge;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
      std::ostringstream msg;
      msg << "LSMC regression at t=" << grid.t(k) << " has condition number " << (lo > 0.0 ? hi / lo : INFINITY);
      throw Error(ErrorCode::IllConditioned, msg.str());
    }
    const Matrix coef = gram.ldlt().solve(phi.transpose() * target * inv_m);
    const Matrix fitted = phi * coef;

    if (origin) {
      sol.y0_std_error.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto col = target.col(i).array();
        const double mean = col.mean();
        const double var = (col - mean).square().sum() / static_cast<double>(std::max<Eigen::Index>(m - 1, 1));
        sol.y0_std_error(i) = std::sqrt(var / static_cast<double>(m));
      }
    }

    sol.y[k].resize(n, m);
    sol.z[k].resize(n * d, m);
    detail::parallel_for(opts.paths, opts.workers, [&](std::size_t lo_p, std::size_t hi_p) {
      Vector ybar(n);
      Matrix zk(n, d);
      for (std::size_t pp = lo_p; pp < hi_p; ++pp) {
        const auto p = static_cast<Eigen::Index>(pp);
        ybar = fitted.row(p).head(n).transpose();
        for (Eigen::Index j = 0; j < d; ++j) {
          for (Eigen::Index i = 0; i < n; ++i) zk(i, j) = fitted(p, n + j * n + i);
        }
        const PicardResult r = picard_step(spec.generator(), grid.t(k), grid.dt, ybar, zk, step);
        sol.y[k].col(p) = r.y;
        sol.z[k].col(p) = Eigen::Map<const Vector>(zk.data(), n * d);
      }
    });
    sol.coefficients[k] = coef;
    sol.design[k] = std::move(phi);
  }
  return sol;
}

// ---------------------------------------------------------------------------

const char* to_string(SchemeType s) noexcept {
  switch (s) {
    case SchemeType::Ode: return "ode";
    case SchemeType::Tree: return "tree";
    case SchemeType::Lsmc: return "lsmc";
  }
  return "?";
}

SchemeType scheme_from_string(const std::string& s) {
  if (s == "ode") return SchemeType::Ode;
  if (s == "tree") return SchemeType::Tree;
  if (s == "lsmc") return SchemeType::Lsmc;
  throw Error(ErrorCode::BadArgs, "unknown scheme '" + s + "' (expected ode, tree or lsmc)");
}

SchemeType Solution::type() const noexcept {
  if (ode()) return SchemeType::Ode;
  if (tree()) return SchemeType::Tree;
  return SchemeType::Lsmc;
}

const TimeGrid& Solution::grid() const noexcept {
  return std::visit([](const auto& s) -> const TimeGrid& { return s.grid; }, impl_);
}

std::size_t Solution::n() const noexcept {
  if (const auto* s = ode()) return static_cast<std::size_t>(s->z.rows());
  if (const auto* s = tree()) return s->n;
  return lsmc()->n;
}

std::size_t Solution::d() const noexcept {
  if (const auto* s = ode()) return static_cast<std::size_t>(s->z.cols());
  if (const auto* s = tree()) return s->d;
  return lsmc()->d;
}

std::size_t Solution::count(std::size_t k) const {
  if (ode()) return 1;
  if (const auto* s = tree()) return s->level_size(k);
  return lsmc()->paths;
}

Vector Solution::y(std::size_t k, std::size_t i) const {
  if (const auto* s = ode()) return s->y.at(k);
  if (const auto* s = tree()) return s->y_at(k, i);
  return lsmc()->y_at(k, i);
}

Matrix Solution::z(std::size_t k, std::size_t i) const {
  if (const auto* s = ode()) return s->z;
  if (const auto* s = tree()) return s->z_at(k, i);
  return lsmc()->z_at(k, i);
}

Solution solve(const BsdeSpec& spec, const SchemeConfig& scheme) {
  const TimeGrid grid = build_grid(spec.horizon(), scheme.steps);
  switch (scheme.type) {
    case SchemeType::Ode:
      return Solution(solve_ode(spec, grid));
    case SchemeType::Tree:
      return Solution(solve_tree(spec, grid, scheme.step_options()));
    case SchemeType::Lsmc: {
      LsmcOptions opts;
      opts.paths = scheme.paths;
      opts.basis_degree = scheme.basis_degree;
      opts.seed = scheme.seed;
      opts.workers = scheme.workers;
      opts.step = scheme.step_options();
      return Solution(solve_lsmc(spec, grid, opts));
    }
  }
  throw Error(ErrorCode::BadArgs, "unknown scheme");
}

}  // namespace bsdecmp
