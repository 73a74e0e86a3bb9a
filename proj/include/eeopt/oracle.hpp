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

// Brute-force reference optimizers.
//
// grid_ee_nt1 is exact up to grid resolution: with one antenna every SINR
// depends on the stream powers only. grid_ee_span searches precoders in the
// span of the two channels and only ever certifies a feasible lower bound.
// Rates are computed here from scalar gains, independently of schemes.hpp;
// the winning point is re-evaluated through the forward model.

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "eeopt/errors.hpp"
#include "eeopt/scenario.hpp"
#include "eeopt/schemes.hpp"

namespace eeopt {

struct GridSpec {
  int power_steps = 101;      ///< levels per stream power, 0..P_t
  int split_steps = 51;       ///< levels of C_1 / R_c, 0..1
  int span_coeff_steps = 5;   ///< mixing angles between the channel directions
  int phase_steps = 4;        ///< relative phases of the second direction
  std::uint64_t max_evaluations = 100'000'000;

  static GridSpec coarse() { return {5, 5, 5, 4}; }

  void validate() const {
    if (power_steps < 2 || split_steps < 2 || span_coeff_steps < 2 ||
        phase_steps < 1)
      throw InvalidArgument("grid steps out of range");
  }
};

struct OracleResult {
  double best_ee = 0.0;
  SchemePoint best_point;
  std::uint64_t census = 0;  ///< number of evaluated grid points
  double wall_seconds = 0.0;
};

namespace oracle_detail {

/// Points (i_1..i_m) with i_j >= 0 and sum <= n - 1.
inline std::uint64_t simplex_count(int streams, int n) {
  // C(n - 1 + streams, streams)
  std::uint64_t c = 1;
  for (int j = 1; j <= streams; ++j)
    c = c * static_cast<std::uint64_t>(n - 1 + j) / static_cast<std::uint64_t>(j);
  return c;
}

inline double rate(double sinr, double w) { return w * std::log2(1.0 + sinr); }

/// Scalar per-stream gains |h_k^H p_s|^2 of one candidate, as a
/// scheme-independent description of RSMA-layout streams c, 1, 2.
struct Gains {
  std::array<double, 2> c{0.0, 0.0};
  std::array<double, 2> p1{0.0, 0.0};
  std::array<double, 2> p2{0.0, 0.0};
};

struct Candidate {
  std::array<double, 2> private_rate{0.0, 0.0};
  double common_rate = 0.0;
};

inline Candidate rsma_candidate(const Gains& g, const Scenario& s) {
  Candidate c;
  const double w = s.bandwidth();
  double rc = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const double n0 = s.noise_power(k);
    rc = std::min(rc, rate(g.c[k] / (g.p1[k] + g.p2[k] + n0), w));
    const double own = k == 0 ? g.p1[k] : g.p2[k];
    const double other = k == 0 ? g.p2[k] : g.p1[k];
    c.private_rate[k] = rate(own / (other + n0), w);
  }
  c.common_rate = rc;
  return c;
}

/// NOMA rates with stream a decoded first; `ga`/`gb` are the per-user
/// gains of the streams of users a and b.
inline std::array<double, 2> noma_candidate(int a,
                                            const std::array<double, 2>& ga,
                                            const std::array<double, 2>& gb,
                                            const Scenario& s) {
  const int b = 1 - a;
  const double w = s.bandwidth();
  std::array<double, 2> r{};
  r[a] = std::min(rate(ga[a] / (gb[a] + s.noise_power(a)), w),
                  rate(ga[b] / (gb[b] + s.noise_power(b)), w));
  r[b] = rate(gb[b] / s.noise_power(b), w);
  return r;
}

/// Best WSR over the split grid for one power candidate. Returns the split
/// index; ties keep the smallest index.
inline int best_split(const Candidate& c, const WeightVector& u, int steps,
                      double& wsr) {
  int best = 0;
  wsr = -1.0;
  for (int m = 0; m < steps; ++m) {
    const double f = static_cast<double>(m) / (steps - 1);
    const double v = u[0] * (f * c.common_rate + c.private_rate[0]) +
                     u[1] * ((1.0 - f) * c.common_rate + c.private_rate[1]);
    if (v > wsr) {
      wsr = v;
      best = m;
    }
  }
  return best;
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace oracle_detail

/// Number of evaluations grid_ee_nt1 performs.
inline std::uint64_t census_nt1(Scheme scheme, const GridSpec& g) {
  using oracle_detail::simplex_count;
  switch (scheme) {
    case Scheme::Sdma:
      return simplex_count(2, g.power_steps);
    case Scheme::Noma:
      return 2 * simplex_count(2, g.power_steps);
    case Scheme::Rsma:
      return simplex_count(3, g.power_steps) *
             static_cast<std::uint64_t>(g.split_steps);
  }
  return 0;
}

/// Exhaustive search over stream powers (and the common split for RSMA)
/// at nt = 1. Ties keep the lexicographically smallest grid index.
inline OracleResult grid_ee_nt1(Scheme scheme, const Scenario& s,
                                const WeightVector& u, const GridSpec& grid = {}) {
  using namespace oracle_detail;
  const auto t0 = std::chrono::steady_clock::now();
  if (s.nt() != 1) throw InvalidArgument("grid_ee_nt1 requires nt = 1");
  grid.validate();
  u.validate();
  OracleResult out;
  out.census = census_nt1(scheme, grid);
  if (out.census > grid.max_evaluations)
    throw GridTooLarge("grid census " + std::to_string(out.census) +
                       " exceeds cap");

  const int n = grid.power_steps;
  const double dp = s.p_t() / (n - 1);
  const std::array<double, 2> a{std::norm(s.channel(0)[0]),
                                std::norm(s.channel(1)[0])};
  auto ee_of = [&](double wsr, int used) {
    return wsr / total_power(used * dp, s);
  };

  double best = -1.0;
  std::array<int, 4> arg{0, 0, 0, 0};  // (common | order, p1, p2, split)
  switch (scheme) {
    case Scheme::Sdma:
    case Scheme::Rsma: {
      const int c_max = scheme == Scheme::Sdma ? 0 : n - 1;
      for (int i = 0; i <= c_max; ++i)
        for (int j = 0; i + j <= n - 1; ++j)
          for (int k = 0; i + j + k <= n - 1; ++k) {
            Gains g;
            for (int q = 0; q < 2; ++q) {
              g.c[q] = a[q] * i * dp;
              g.p1[q] = a[q] * j * dp;
              g.p2[q] = a[q] * k * dp;
            }
            const Candidate c = rsma_candidate(g, s);
            double wsr = 0.0;
            int m = 0;
            if (scheme == Scheme::Rsma) {
              m = best_split(c, u, grid.split_steps, wsr);
            } else {
              wsr = u[0] * c.private_rate[0] + u[1] * c.private_rate[1];
            }
            const double ee = ee_of(wsr, i + j + k);
            if (ee > best) {
              best = ee;
              arg = {i, j, k, m};
            }
          }
      break;
    }
    case Scheme::Noma:
      for (int order = 0; order < 2; ++order) {
        const int first = order == 0 ? 0 : 1;
        for (int j = 0; j <= n - 1; ++j)
          for (int k = 0; j + k <= n - 1; ++k) {
            // j and k are the powers of user 1's and user 2's streams.
            const std::array<double, 2> g1{a[0] * j * dp, a[1] * j * dp};
            const std::array<double, 2> g2{a[0] * k * dp, a[1] * k * dp};
            const auto r = noma_candidate(first, first == 0 ? g1 : g2,
                                          first == 0 ? g2 : g1, s);
            const double ee = ee_of(u[0] * r[0] + u[1] * r[1], j + k);
            if (ee > best) {
              best = ee;
              arg = {order, j, k, 0};
            }
          }
      }
      break;
  }

  // Rebuild the maximizer as a scheme point.
  auto vec = [&](int idx) {
    CVector v(1);
    v[0] = std::sqrt(idx * dp);
    return v;
  };
  SchemePoint& pt = out.best_point;
  pt.scheme = scheme;
  switch (scheme) {
    case Scheme::Sdma:
      pt.precoders.priv = {vec(arg[1]), vec(arg[2])};
      break;
    case Scheme::Rsma: {
      pt.precoders.common = vec(arg[0]);
      pt.precoders.priv = {vec(arg[1]), vec(arg[2])};
      const double rc = rsma_rates(pt.precoders, {}, s).common_rate;
      const double f = static_cast<double>(arg[3]) / (grid.split_steps - 1);
      pt.split = {{f * rc, (1.0 - f) * rc}};
      break;
    }
    case Scheme::Noma:
      pt.order = arg[0] == 0 ? DecodingOrder::natural() : DecodingOrder::reversed();
      pt.precoders.priv = {vec(arg[1]), vec(arg[2])};
      break;
  }
  out.best_ee = evaluate_ee(pt, u, s);
  out.wall_seconds = elapsed(t0);
  return out;
}

namespace oracle_detail {

/// Unit directions cos(psi) q1 + sin(psi) e^{j phi} q2 on the grid; only q1
/// when the channels are parallel.
inline std::vector<CVector> span_directions(const Scenario& s, const GridSpec& g) {
  const CVector& h1 = s.channel(0);
  const CVector& h2 = s.channel(1);
  const CVector& lead = h1.norm() > 0.0 ? h1 : h2;
  const CVector q1 = lead / lead.norm();
  const CVector& other = h1.norm() > 0.0 ? h2 : h1;
  CVector r = other - q1 * q1.dot(other);
  std::vector<CVector> dirs;
  if (r.norm() <= 1e-12 * std::max(1.0, other.norm())) {
    dirs.push_back(q1);
    return dirs;
  }
  const CVector q2 = r / r.norm();
  for (int i = 0; i < g.span_coeff_steps; ++i) {
    const double psi = 0.5 * kPi * i / (g.span_coeff_steps - 1);
    const int phases = (i == 0) ? 1 : g.phase_steps;
    for (int m = 0; m < phases; ++m) {
      const double phi = 2.0 * kPi * m / g.phase_steps;
      dirs.push_back(std::cos(psi) * q1 +
                     std::sin(psi) * std::polar(1.0, phi) * q2);
    }
  }
  return dirs;
}

}  // namespace oracle_detail

/// Number of evaluations grid_ee_span performs.
inline std::uint64_t census_span(Scheme scheme, const Scenario& s,
                                 const GridSpec& g) {
  using oracle_detail::simplex_count;
  const auto d = static_cast<std::uint64_t>(oracle_detail::span_directions(s, g).size());
  switch (scheme) {
    case Scheme::Sdma:
      return simplex_count(2, g.power_steps) * d * d;
    case Scheme::Noma:
      return 2 * simplex_count(2, g.power_steps) * d * d;
    case Scheme::Rsma:
      return simplex_count(3, g.power_steps) * d * d * d *
             static_cast<std::uint64_t>(g.split_steps);
  }
  return 0;
}

/// Grid search over stream powers and span{h_1, h_2} directions. The result
/// is feasible by construction, hence a lower bound on the optimum.
inline OracleResult grid_ee_span(Scheme scheme, const Scenario& s,
                                 const WeightVector& u,
                                 const GridSpec& grid = GridSpec::coarse()) {
  using namespace oracle_detail;
  const auto t0 = std::chrono::steady_clock::now();
  if (s.nt() < 2) throw InvalidArgument("grid_ee_span requires nt >= 2");
  grid.validate();
  u.validate();
  OracleResult out;
  out.census = census_span(scheme, s, grid);
  if (out.census > grid.max_evaluations)
    throw GridTooLarge("grid census " + std::to_string(out.census) +
                       " exceeds cap");

  const auto dirs = span_directions(s, grid);
  const int nd = static_cast<int>(dirs.size());
  // gain[k][d] = |h_k^H d|^2
  std::array<std::vector<double>, 2> gain;
  for (int k = 0; k < 2; ++k)
    for (const auto& d : dirs) gain[k].push_back(std::norm(s.channel(k).dot(d)));

  const int n = grid.power_steps;
  const double dp = s.p_t() / (n - 1);
  double best = -1.0;
  // (power c, p1, p2, dir c, dir 1, dir 2, split | order)
  std::array<int, 7> arg{};

  if (scheme == Scheme::Noma) {
    for (int order = 0; order < 2; ++order)
      for (int j = 0; j <= n - 1; ++j)
        for (int k = 0; j + k <= n - 1; ++k)
          for (int d1 = 0; d1 < nd; ++d1)
            for (int d2 = 0; d2 < nd; ++d2) {
              // j/d1 describe user 1's stream, k/d2 user 2's.
              const std::array<double, 2> g1{gain[0][d1] * j * dp,
                                             gain[1][d1] * j * dp};
              const std::array<double, 2> g2{gain[0][d2] * k * dp,
                                             gain[1][d2] * k * dp};
              const int first = order;
              const auto r = noma_candidate(first, first == 0 ? g1 : g2,
                                            first == 0 ? g2 : g1, s);
              const double ee =
                  (u[0] * r[0] + u[1] * r[1]) / total_power((j + k) * dp, s);
              if (ee > best) {
                best = ee;
                arg = {0, j, k, 0, d1, d2, order};
              }
            }
  } else {
    const int c_max = scheme == Scheme::Sdma ? 0 : n - 1;
    const int dc_max = scheme == Scheme::Sdma ? 1 : nd;
    for (int i = 0; i <= c_max; ++i)
      for (int j = 0; i + j <= n - 1; ++j)
        for (int k = 0; i + j + k <= n - 1; ++k)
          for (int dc = 0; dc < dc_max; ++dc)
            for (int d1 = 0; d1 < nd; ++d1)
              for (int d2 = 0; d2 < nd; ++d2) {
                Gains g;
                for (int q = 0; q < 2; ++q) {
                  g.c[q] = gain[q][dc] * i * dp;
                  g.p1[q] = gain[q][d1] * j * dp;
                  g.p2[q] = gain[q][d2] * k * dp;
                }
                const Candidate c = rsma_candidate(g, s);
                double wsr = 0.0;
                int m = 0;
                if (scheme == Scheme::Rsma) {
                  m = best_split(c, u, grid.split_steps, wsr);
                } else {
                  wsr = u[0] * c.private_rate[0] + u[1] * c.private_rate[1];
                }
                const double ee = wsr / total_power((i + j + k) * dp, s);
                if (ee > best) {
                  best = ee;
                  arg = {i, j, k, dc, d1, d2, m};
                }
              }
  }

  SchemePoint& pt = out.best_point;
  pt.scheme = scheme;
  pt.precoders.priv = {std::sqrt(arg[1] * dp) * dirs[arg[4]],
                       std::sqrt(arg[2] * dp) * dirs[arg[5]]};
  if (scheme == Scheme::Rsma) {
    pt.precoders.common = std::sqrt(arg[0] * dp) * dirs[arg[3]];
    const double rc = rsma_rates(pt.precoders, {}, s).common_rate;
    const double f = static_cast<double>(arg[6]) / (grid.split_steps - 1);
    pt.split = {{f * rc, (1.0 - f) * rc}};
  } else if (scheme == Scheme::Noma) {
    pt.order = arg[6] == 0 ? DecodingOrder::natural() : DecodingOrder::reversed();
  }
  out.best_ee = evaluate_ee(pt, u, s);
  out.wall_seconds = elapsed(t0);
  return out;
}

/// Single-user EE W log2(1 + a P / N0) / (P / eta + P_cir) maximized over
/// P in [0, p_max] by golden-section search (the ratio is unimodal).
struct SingleUserOptimum {
  double power = 0.0;
  double ee = 0.0;
};

inline SingleUserOptimum single_user_ee(double gain, double noise,
                                        double bandwidth, double eta,
                                        double p_cir, double p_max,
                                        double tol = 1e-12) {
  auto f = [&](double p) {
    return bandwidth * std::log2(1.0 + gain * p / noise) / (p / eta + p_cir);
  };
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = p_max;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol * std::max(1.0, p_max)) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  const double p = 0.5 * (lo + hi);
  return {p, f(p)};
}

}  // namespace eeopt
