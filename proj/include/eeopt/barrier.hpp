// Copyright 2026 The eeopt Authors
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

// Built-in conic backend: a primal log-barrier path-following method.
//
// Barriers (nu = barrier parameter):
//   linear      s >= 0               -log s                      nu = 1
//   SOC         ||w|| <= u           -log(u^2 - ||w||^2)          nu = 2
//   exp         exp(v) <= y          -log(log y - v) - log y      nu = 2
//
// Equalities are eliminated through an orthonormal null-space basis. A
// phase-I problem (every cone relaxed by a common scalar s, minimized) finds
// a strictly feasible start when the hint is not one.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eeopt/conic.hpp"

namespace eeopt::conic {

struct BarrierSettings {
  /// Stop when nu / tau <= gap_tolerance * max(1, |objective|).
  double gap_tolerance = 1e-8;
  /// Admissible residual of equality constraints.
  double feasibility_tolerance = 1e-8;
  /// Newton decrement threshold lambda^2 / 2 for one centering stage.
  double centering_tolerance = 1e-8;
  double mu = 20.0;
  int max_newton_steps = 2000;
  bool exponential_cone = true;
};

namespace barrier_detail {

struct Block {
  ConstraintKind kind;
  Eigen::MatrixXd rows;  // one row per affine expression
  Eigen::VectorXd offset;
};

struct Problem {
  std::vector<Block> blocks;
  Eigen::VectorXd objective;  // maximize objective . y
  double nu = 0.0;
};

inline double block_nu(ConstraintKind k) {
  return k == ConstraintKind::Linear ? 1.0 : 2.0;
}

/// Barrier value, gradient and Hessian of F(y) = -tau c.y + phi(y).
/// Returns false when y lies outside the barrier domain. Blocks are stored
/// restricted to the columns they touch.
class Evaluator {
 public:
  explicit Evaluator(const Problem& p) : objective_(p.objective) {
    local_.reserve(p.blocks.size());
    for (const auto& b : p.blocks) {
      Local l;
      l.kind = b.kind;
      for (Eigen::Index j = 0; j < b.rows.cols(); ++j)
        if (b.rows.col(j).cwiseAbs().maxCoeff() > 0.0) l.cols.push_back(j);
      l.rows = b.rows(Eigen::all, l.cols);
      l.offset = b.offset;
      local_.push_back(std::move(l));
    }
  }

  bool value(const Eigen::VectorXd& y, double tau, double& f) const {
    f = -tau * objective_.dot(y);
    for (const auto& b : local_) {
      double term = 0.0;
      if (!block_value(b.kind, b.at(y), term)) return false;
      f += term;
    }
    return std::isfinite(f);
  }

  bool in_domain(const Eigen::VectorXd& y) const {
    for (const auto& b : local_) {
      double term = 0.0;
      if (!block_value(b.kind, b.at(y), term)) return false;
    }
    return true;
  }

  bool derivatives(const Eigen::VectorXd& y, double tau, Eigen::VectorXd& g,
                   Eigen::MatrixXd& h) const {
    const auto n = y.size();
    g = -tau * objective_;
    h.setZero(n, n);
    for (const auto& b : local_) {
      const Eigen::VectorXd v = b.at(y);
      Eigen::VectorXd gl;
      Eigen::MatrixXd hl;
      switch (b.kind) {
        case ConstraintKind::Linear: {
          const double s = v[0];
          if (!(s > 0.0)) return false;
          const auto r = b.rows.row(0).transpose();
          gl = -r / s;
          hl = (r * r.transpose()) / (s * s);
          break;
        }
        case ConstraintKind::SecondOrderCone: {
          const double u = v[0];
          const auto w = v.tail(v.size() - 1);
          const double wn = w.norm();
          const double q = (u - wn) * (u + wn);
          if (!(u > 0.0) || !(u - wn > 0.0)) return false;
          Eigen::VectorXd dq(v.size());
          dq[0] = 2.0 * u;
          dq.tail(v.size() - 1) = -2.0 * w;
          const Eigen::VectorXd gv = b.rows.transpose() * dq;
          gl = -gv / q;
          hl = (gv * gv.transpose()) / (q * q);
          const auto r0 = b.rows.row(0).transpose();
          hl.noalias() -= (2.0 / q) * (r0 * r0.transpose());
          const auto wrows = b.rows.bottomRows(b.rows.rows() - 1);
          hl.noalias() += (2.0 / q) * (wrows.transpose() * wrows);
          break;
        }
        case ConstraintKind::Exponential: {
          const double e = v[0];
          const double yy = v[1];
          if (!(yy > 0.0)) return false;
          const double l = std::log(yy) - e;
          if (!(l > 0.0)) return false;
          // dL/dv = (-1, 1/y), d2L/dv2 = diag(0, -1/y^2)
          Eigen::Vector2d dl(-1.0, 1.0 / yy);
          Eigen::Vector2d gv2 = -dl / l;
          gv2[1] -= 1.0 / yy;
          Eigen::Matrix2d k = (dl * dl.transpose()) / (l * l);
          k(1, 1) += 1.0 / (yy * yy * l) + 1.0 / (yy * yy);
          gl = b.rows.transpose() * gv2;
          hl = b.rows.transpose() * (k * b.rows);
          break;
        }
        case ConstraintKind::Equality:
          continue;
      }
      g(b.cols) += gl;
      h(b.cols, b.cols) += hl;
    }
    return g.allFinite() && h.allFinite();
  }

 private:
  static bool block_value(ConstraintKind kind, const Eigen::VectorXd& v,
                          double& term) {
    switch (kind) {
      case ConstraintKind::Linear:
        if (!(v[0] > 0.0)) return false;
        term = -std::log(v[0]);
        return true;
      case ConstraintKind::SecondOrderCone: {
        const double u = v[0];
        const double wn = v.tail(v.size() - 1).norm();
        if (!(u > 0.0) || !(u - wn > 0.0)) return false;
        term = -std::log(u - wn) - std::log(u + wn);
        return true;
      }
      case ConstraintKind::Exponential: {
        if (!(v[1] > 0.0)) return false;
        const double l = std::log(v[1]) - v[0];
        if (!(l > 0.0)) return false;
        term = -std::log(l) - std::log(v[1]);
        return true;
      }
      case ConstraintKind::Equality:
        return true;
    }
    return false;
  }

  struct Local {
    ConstraintKind kind;
    std::vector<Eigen::Index> cols;
    Eigen::MatrixXd rows;
    Eigen::VectorXd offset;

    Eigen::VectorXd at(const Eigen::VectorXd& y) const {
      return rows * y(cols) + offset;
    }
  };

  Eigen::VectorXd objective_;
  std::vector<Local> local_;
};

/// Solves H d = -g, regularizing when H is numerically singular.
inline bool newton_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                             Eigen::VectorXd& d) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    d = ldlt.solve(-g);
    if (d.allFinite()) return true;
  }
  const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  double delta = 1e-14 * scale;
  for (int attempt = 0; attempt < 12; ++attempt, delta *= 10.0) {
    Eigen::MatrixXd hr = h;
    hr.diagonal().array() += delta;
    Eigen::LLT<Eigen::MatrixXd> llt(hr);
    if (llt.info() != Eigen::Success) continue;
    d = llt.solve(-g);
    if (d.allFinite()) return true;
  }
  return false;
}

enum class PathResult { Converged, StepLimit, Failure, EarlyStop };

/// Path following from a strictly feasible y. `stop(y, tau, centered)` is
/// polled after every Newton step and after every centering stage; returning
/// true ends the run early.
template <typename StopFn>
PathResult follow_path(const Problem& p, Eigen::VectorXd& y,
                       const BarrierSettings& cfg, int& steps, StopFn stop) {
  Evaluator ev(p);
  const auto n = y.size();
  Eigen::VectorXd g(n), d(n), trial(n);
  Eigen::MatrixXd h(n, n);
  const double scale0 = 1.0 + y.cwiseAbs().maxCoeff();

  double obj = p.objective.dot(y);
  double tau = std::max(1e-2, p.nu / std::max(1.0, std::abs(obj)));
  // The tau for which y is closest to centered, in the local norm.
  if (ev.derivatives(y, 0.0, g, h)) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      const Eigen::VectorXd hc = ldlt.solve(p.objective);
      const double cc = p.objective.dot(hc);
      const double best = cc > 0.0 ? g.dot(hc) / cc : 0.0;
      const double cap =
          p.nu / (cfg.gap_tolerance * std::max(1.0, std::abs(obj)));
      if (std::isfinite(best) && best > tau) tau = std::min(best, cap);
    }
  }
  while (true) {
    // centering
    int tail_steps = 0;
    for (;;) {
      if (++steps > cfg.max_newton_steps) return PathResult::StepLimit;
      if (!ev.derivatives(y, tau, g, h)) return PathResult::Failure;
      if (!newton_direction(h, g, d)) return PathResult::Failure;
      const double lambda2 = -g.dot(d);
      if (!(lambda2 >= -1e-12)) return PathResult::Failure;
      if (lambda2 / 2.0 <= cfg.centering_tolerance) break;

      double f0 = 0.0;
      if (!ev.value(y, tau, f0)) return PathResult::Failure;
      // Below this decrement round-off in f dominates the Armijo test; a
      // few full steps are all that can still help.
      const double noise_floor =
          std::max(1e-6, 100.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0)));
      const bool exact_tail = lambda2 < noise_floor;
      if (exact_tail && ++tail_steps > 8) break;
      double step = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        trial = y + step * d;
        if (exact_tail) {
          if (ev.in_domain(trial)) {
            accepted = true;
            break;
          }
          continue;
        }
        double f1 = 0.0;
        if (ev.value(trial, tau, f1) && f1 <= f0 - 0.01 * step * lambda2) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // Armijo cannot resolve the decrease at this magnitude: the point is
        // centered as far as double precision allows.
        if (lambda2 < 1e-4) break;
        return PathResult::Failure;
      }
      y = trial;
      if (y.cwiseAbs().maxCoeff() > 1e12 * scale0) return PathResult::Failure;
      if (stop(y, tau, false)) return PathResult::EarlyStop;
    }
    if (stop(y, tau, true)) return PathResult::EarlyStop;
    obj = p.objective.dot(y);
    if (p.nu / tau <= cfg.gap_tolerance * std::max(1.0, std::abs(obj)))
      return PathResult::Converged;
    tau *= cfg.mu;
  }
}

/// Dense rows of an expression over the full variable vector.
inline Eigen::RowVectorXd dense_row(const LinExpr& e, std::size_t n) {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [i, a] : e.terms()) r[static_cast<Eigen::Index>(i)] += a;
  return r;
}

/// Affine substitution x = x0 + Z y.
struct Reduction {
  bool identity = true;
  Eigen::VectorXd x0;
  Eigen::MatrixXd z;

  Eigen::VectorXd lift(const Eigen::VectorXd& y) const {
    return identity ? y : Eigen::VectorXd(x0 + z * y);
  }
  Eigen::VectorXd reduce(const Eigen::VectorXd& x) const {
    return identity ? x : Eigen::VectorXd(z.transpose() * (x - x0));
  }
};

}  // namespace barrier_detail

class BarrierSolver final : public Backend {
 public:
  explicit BarrierSolver(BarrierSettings settings = {}) : cfg_(settings) {}

  BackendCapabilities capabilities() const override {
    return {true, cfg_.exponential_cone};
  }

  const BarrierSettings& settings() const { return cfg_; }

  SolveStatus solve(const ConicProgram& program,
                    std::span<const double> hint = {}) const override {
    using namespace barrier_detail;
    if (program.has_exponential() && !cfg_.exponential_cone)
      throw BackendUnsupported("barrier backend configured without exp cone");

    const std::size_t n = program.num_variables();
    SolveStatus out;
    if (n == 0) {
      out.status = Status::Optimal;
      out.objective_value = program.objective().constant();
      out.assignment = std::vector<double>{};
      return out;
    }

    // Equalities.
    std::vector<const Constraint*> eqs;
    for (const auto& c : program.constraints())
      if (c.kind == ConstraintKind::Equality) eqs.push_back(&c);

    Reduction red;
    const auto nn = static_cast<Eigen::Index>(n);
    if (!eqs.empty()) {
      Eigen::MatrixXd e(static_cast<Eigen::Index>(eqs.size()), nn);
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(eqs.size()));
      for (std::size_t i = 0; i < eqs.size(); ++i) {
        e.row(static_cast<Eigen::Index>(i)) = dense_row(eqs[i]->exprs[0], n);
        rhs[static_cast<Eigen::Index>(i)] = -eqs[i]->exprs[0].constant();
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
      svd.setThreshold(1e-12);
      red.identity = false;
      red.x0 = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(e).solve(rhs);
      if ((e * red.x0 - rhs).cwiseAbs().maxCoeff() >
          cfg_.feasibility_tolerance * (1.0 + rhs.cwiseAbs().maxCoeff())) {
        out.status = Status::Infeasible;
        return out;
      }
      const auto rank = svd.rank();
      red.z = svd.matrixV().rightCols(nn - rank);
    }

    Problem base;
    Eigen::VectorXd cfull = dense_row(program.objective(), n).transpose();
    base.objective = red.identity ? cfull : Eigen::VectorXd(red.z.transpose() * cfull);
    for (const auto& c : program.constraints()) {
      if (c.kind == ConstraintKind::Equality) continue;
      Block b;
      b.kind = c.kind;
      const auto m = static_cast<Eigen::Index>(c.exprs.size());
      Eigen::MatrixXd rows(m, nn);
      b.offset.resize(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        rows.row(i) = dense_row(c.exprs[static_cast<std::size_t>(i)], n);
        b.offset[i] = c.exprs[static_cast<std::size_t>(i)].constant();
      }
      if (red.identity) {
        b.rows = std::move(rows);
      } else {
        b.offset += rows * red.x0;
        b.rows = rows * red.z;
      }
      base.nu += block_nu(b.kind);
      base.blocks.push_back(std::move(b));
    }
    const Eigen::Index dim = red.identity ? nn : red.z.cols();

    auto finish = [&](const Eigen::VectorXd& y, int steps) {
      const Eigen::VectorXd x = red.lift(y);
      out.assignment = std::vector<double>(x.data(), x.data() + x.size());
      out.objective_value = program.objective().evaluate(*out.assignment);
      out.solver_iterations = steps;
      const double viol = max_violation(program, *out.assignment);
      out.status = viol <= cfg_.feasibility_tolerance * 10.0
                       ? Status::Optimal
                       : Status::NumericalFailure;
      if (!out.optimal()) out.assignment.reset();
      return out;
    };

    if (dim == 0) return finish(Eigen::VectorXd(0), 0);

    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(dim);
    if (hint.size() == n) {
      Eigen::VectorXd hx = Eigen::Map<const Eigen::VectorXd>(hint.data(), nn);
      if (hx.allFinite()) y0 = red.reduce(hx);
    }

    int steps = 0;
    Evaluator ev(base);
    if (base.blocks.empty()) {
      // Only an affine objective over an affine set.
      if (base.objective.cwiseAbs().maxCoeff() > 0.0) {
        out.status = Status::NumericalFailure;  // unbounded
        return out;
      }
      return finish(y0, 0);
    }

    if (!ev.in_domain(y0)) {
      auto start = phase_one(base, y0, steps);
      if (!start.point) {
        out.status = start.infeasible ? Status::Infeasible
                                      : Status::NumericalFailure;
        out.solver_iterations = steps;
        return out;
      }
      y0 = *start.point;
    }

    Eigen::VectorXd y = y0;
    const auto res =
        follow_path(base, y, cfg_, steps,
                    [](const Eigen::VectorXd&, double, bool) { return false; });
    if (res != PathResult::Converged) {
      out.status = Status::NumericalFailure;
      out.solver_iterations = steps;
      return out;
    }
    return finish(y, steps);
  }

 private:
  struct PhaseOne {
    std::optional<Eigen::VectorXd> point;
    bool infeasible = false;
  };

  PhaseOne phase_one(const barrier_detail::Problem& base,
                     const Eigen::VectorXd& y0, int& steps) const {
    using namespace barrier_detail;
    const Eigen::Index dim = y0.size();
    Problem p1;
    p1.objective = Eigen::VectorXd::Zero(dim + 1);
    p1.objective[dim] = -1.0;

    double s0 = 0.0;
    for (const auto& b : base.blocks) {
      Block a;
      a.kind = b.kind;
      a.rows.resize(b.rows.rows(), dim + 1);
      a.rows.leftCols(dim) = b.rows;
      a.rows.col(dim).setZero();
      a.offset = b.offset;
      const Eigen::VectorXd v = b.rows * y0 + b.offset;
      switch (b.kind) {
        case ConstraintKind::Linear:
          a.rows(0, dim) = 1.0;
          s0 = std::max(s0, -v[0]);
          break;
        case ConstraintKind::SecondOrderCone:
          a.rows(0, dim) = 1.0;
          s0 = std::max(s0, v.tail(v.size() - 1).norm() - v[0]);
          break;
        case ConstraintKind::Exponential: {
          a.rows(1, dim) = 1.0;
          // exp(v0) <= v1 + s needs v1 + s >= exp(v0) with margin
          const double need = std::exp(std::min(v[0], 700.0)) * std::exp(1.0) - v[1];
          s0 = std::max(s0, need);
          break;
        }
        case ConstraintKind::Equality:
          break;
      }
      p1.nu += block_nu(a.kind);
      p1.blocks.push_back(std::move(a));
    }
    if (!std::isfinite(s0)) return {};
    s0 = 2.0 * s0 + 1.0;

    const double radius = 1e4 * (1.0 + y0.cwiseAbs().maxCoeff() + s0);
    for (Eigen::Index i = 0; i <= dim; ++i) {
      for (double sign : {1.0, -1.0}) {
        Block b;
        b.kind = ConstraintKind::Linear;
        b.rows = Eigen::MatrixXd::Zero(1, dim + 1);
        b.rows(0, i) = sign;
        const double center = i < dim ? y0[i] : s0;
        b.offset = Eigen::VectorXd::Constant(1, radius - sign * center);
        p1.nu += 1.0;
        p1.blocks.push_back(std::move(b));
      }
    }

    Eigen::VectorXd ys(dim + 1);
    ys.head(dim) = y0;
    ys[dim] = s0;
    if (!Evaluator(p1).in_domain(ys)) return {};

    // s* >= s - nu/tau on the central path, so a positive lower bound
    // certifies an empty interior.
    BarrierSettings cfg = cfg_;
    cfg.gap_tolerance = 1e-11;
    bool certified = false;
    const double nu = p1.nu;
    auto res = follow_path(
        p1, ys, cfg, steps,
        [dim, nu, &certified](const Eigen::VectorXd& v, double tau, bool centered) {
          if (v[dim] < 0.0) return true;
          if (centered && v[dim] - nu / tau > 0.0) certified = true;
          return certified;
        });
    if (ys[dim] < 0.0) {
      Eigen::VectorXd y = ys.head(dim);
      if (Evaluator(base).in_domain(y)) return {std::move(y), false};
      return {};
    }
    return {std::nullopt, certified || res == PathResult::Converged};
  }

  BarrierSettings cfg_;
};

}  // namespace eeopt::conic
