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

// EE-region sweeps over the user-2 weight and region comparison.

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "eeopt/sca.hpp"

namespace eeopt {

/// Exponents e of u_2 = 10^e; u_1 = 1.
struct WeightSweep {
  std::vector<double> exponents;

  /// [-3] + {-1, -0.95, ..., 1} + [3]: 43 points.
  static WeightSweep standard() {
    WeightSweep w;
    w.exponents.push_back(-3.0);
    for (int i = -20; i <= 20; ++i) w.exponents.push_back(i / 20.0);
    w.exponents.push_back(3.0);
    return w;
  }

  void validate() const {
    if (exponents.empty()) throw InvalidArgument("weight sweep is empty");
    for (double e : exponents)
      if (!std::isfinite(e)) throw InvalidArgument("weight exponent must be finite");
  }

  std::size_t size() const { return exponents.size(); }
  WeightVector weights(std::size_t i) const {
    return {1.0, std::pow(10.0, exponents.at(i))};
  }
};

struct RegionPoint {
  double exponent = 0.0;
  double u2 = 0.0;
  double ee = 0.0;   ///< weighted EE
  double ee1 = 0.0;  ///< R_1 / P_total
  double ee2 = 0.0;  ///< R_2 / P_total
  double wsr = 0.0;
  double power_w = 0.0;  ///< transmit power tr(PP^H)
  int iterations = 0;
  bool converged = false;
  bool valid = false;  ///< false when the solve failed
  std::string error;
  SchemePoint point;
};

struct RegionBoundary {
  Scheme scheme = Scheme::Rsma;
  std::vector<RegionPoint> points;
};

struct SweepOptions {
  ScaOptions sca;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

/// Solves `scheme` at every weight point. Points of `warm_from` boundaries
/// (same sweep) seed the solve at the matching weight.
inline RegionBoundary sweep(Scheme scheme, const Scenario& s,
                            const WeightSweep& ws, const SweepOptions& opt = {},
                            std::span<const RegionBoundary> warm_from = {}) {
  ws.validate();
  for (const auto& b : warm_from)
    if (b.points.size() != ws.size())
      throw InvalidArgument("warm-start boundary does not match the sweep");
  RegionBoundary out;
  out.scheme = scheme;
  out.points.resize(ws.size());
  parallel_for(ws.size(), opt.threads, [&](std::size_t i) {
    RegionPoint& p = out.points[i];
    p.exponent = ws.exponents[i];
    const WeightVector u = ws.weights(i);
    p.u2 = u[1];
    ScaOptions sca = opt.sca;
    // Seeded by the exponent, so reordering the sweep reorders the output.
    sca.seed = sca_detail::mix(opt.sca.seed ^ std::bit_cast<std::uint64_t>(p.exponent));
    for (const auto& b : warm_from)
      if (b.points[i].valid) sca.warm_starts.push_back(b.points[i].point);
    try {
      const SolveResult r = solve_scheme(scheme, s, u, sca);
      const auto ind = individual_ee(r.point, s);
      p.ee = r.ee;
      p.ee1 = ind[0];
      p.ee2 = ind[1];
      p.wsr = r.wsr;
      p.power_w = r.transmit_power;
      p.iterations = r.iterations;
      p.converged = r.converged;
      p.valid = true;
      p.point = r.point;
    } catch (const Error& e) {
      p.error = e.what();
    }
  });
  return out;
}

/// SDMA and NOMA sweeps followed by an RSMA sweep warm-started from both.
/// Boundaries are returned in the order of `schemes`.
inline std::vector<RegionBoundary> sweep_schemes(std::span<const Scheme> schemes,
                                                 const Scenario& s,
                                                 const WeightSweep& ws,
                                                 const SweepOptions& opt = {}) {
  auto has = [&](Scheme x) {
    return std::find(schemes.begin(), schemes.end(), x) != schemes.end();
  };
  std::optional<RegionBoundary> sd, no, rs;
  if (has(Scheme::Sdma) || has(Scheme::Rsma)) sd = sweep(Scheme::Sdma, s, ws, opt);
  if (has(Scheme::Noma) || has(Scheme::Rsma)) no = sweep(Scheme::Noma, s, ws, opt);
  if (has(Scheme::Rsma)) {
    const std::vector<RegionBoundary> warm{*sd, *no};
    rs = sweep(Scheme::Rsma, s, ws, opt, warm);
  }
  std::vector<RegionBoundary> out;
  for (Scheme x : schemes) {
    switch (x) {
      case Scheme::Sdma: out.push_back(*sd); break;
      case Scheme::Noma: out.push_back(*no); break;
      case Scheme::Rsma: out.push_back(*rs); break;
    }
  }
  return out;
}

struct DominanceViolation {
  std::size_t index = 0;  ///< point of the dominated boundary
  double ee1 = 0.0;
  double ee2 = 0.0;
  double shortfall = 0.0;  ///< smallest max-coordinate deficit against `a`
};

struct DominanceReport {
  bool dominates = true;
  std::vector<DominanceViolation> violations;
  explicit operator bool() const { return dominates; }
};

/// True iff every valid point of `b` is weakly dominated, within `tol` per
/// coordinate, by some valid point of `a`.
inline DominanceReport region_dominates(const RegionBoundary& a,
                                        const RegionBoundary& b, double tol) {
  DominanceReport rep;
  for (std::size_t j = 0; j < b.points.size(); ++j) {
    const auto& q = b.points[j];
    if (!q.valid) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a.points) {
      if (!p.valid) continue;
      const double deficit = std::max({q.ee1 - p.ee1, q.ee2 - p.ee2, 0.0});
      best = std::min(best, deficit);
    }
    if (!(best <= tol)) {
      rep.dominates = false;
      rep.violations.push_back({j, q.ee1, q.ee2, best});
    }
  }
  return rep;
}

/// Fraction of sweep points that converged.
inline double converged_fraction(std::span<const RegionBoundary> bs) {
  std::size_t n = 0, ok = 0;
  for (const auto& b : bs)
    for (const auto& p : b.points) {
      ++n;
      ok += p.valid && p.converged;
    }
  return n == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(n);
}

}  // namespace eeopt
