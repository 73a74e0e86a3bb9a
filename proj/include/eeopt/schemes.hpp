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

// Forward model: SINRs, achievable rates, weighted sum rate and energy
// efficiency of a given precoder choice under SDMA, NOMA and RSMA.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "eeopt/scenario.hpp"

namespace eeopt {

enum class Scheme { Rsma, Sdma, Noma };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Rsma: return "rsma";
    case Scheme::Sdma: return "sdma";
    case Scheme::Noma: return "noma";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "rsma") return Scheme::Rsma;
  if (name == "sdma") return Scheme::Sdma;
  if (name == "noma") return Scheme::Noma;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

/// Beamformers [p_c, p_1, p_2]; the common vector is absent for SDMA/NOMA.
struct PrecoderSet {
  std::optional<CVector> common;
  std::array<CVector, 2> priv;

  static PrecoderSet zeros(int nt, bool with_common) {
    PrecoderSet p;
    if (with_common) p.common = CVector::Zero(nt);
    p.priv = {CVector::Zero(nt), CVector::Zero(nt)};
    return p;
  }

  /// tr(P P^H).
  double transmit_power() const {
    double total = priv[0].squaredNorm() + priv[1].squaredNorm();
    if (common) total += common->squaredNorm();
    return total;
  }

  bool has_active_common() const {
    return common.has_value() && common->squaredNorm() > 0.0;
  }
};

/// Shares (C_1, C_2) of the RSMA common rate.
struct CommonRateSplit {
  std::array<double, 2> c{0.0, 0.0};

  double sum() const { return c[0] + c[1]; }
};

/// NOMA decoding order: user `first` is decoded (by both users) first.
/// Users are indexed 0 and 1.
struct DecodingOrder {
  int first = 0;
  int second = 1;

  static DecodingOrder natural() { return {0, 1}; }
  static DecodingOrder reversed() { return {1, 0}; }

  void validate() const {
    if (!((first == 0 && second == 1) || (first == 1 && second == 0)))
      throw InvalidArgument("decoding order must be a permutation of {1,2}");
  }
  bool operator==(const DecodingOrder&) const = default;
};

/// Everything needed to evaluate one transmission strategy.
struct SchemePoint {
  Scheme scheme = Scheme::Rsma;
  PrecoderSet precoders;
  CommonRateSplit split;
  DecodingOrder order;
};

struct RateReport {
  std::array<double, 2> per_user_rate{0.0, 0.0};
  std::optional<double> common_rate;
  double weighted_sum_rate = 0.0;
  double energy_efficiency = 0.0;
  double transmit_power = 0.0;
};

/// Tolerance [bit/s] on the common-rate split feasibility check.
inline constexpr double kSplitTolerance = 1e-9;
/// Relative slack on the transmit power budget.
inline constexpr double kPowerTolerance = 1e-8;

namespace detail {

/// |h^H p|^2
inline double gain(const CVector& h, const CVector& p) {
  return std::norm(h.dot(p));
}

inline double rate(double sinr, double bandwidth) {
  return bandwidth * std::log2(1.0 + sinr);
}

inline void check_dimensions(const PrecoderSet& p, const Scenario& s) {
  const auto nt = static_cast<Eigen::Index>(s.nt());
  if (p.priv[0].size() != nt || p.priv[1].size() != nt ||
      (p.common && p.common->size() != nt))
    throw InvalidArgument("precoder length does not match the antenna count");
}

inline void require_no_common(const PrecoderSet& p, const char* who) {
  if (p.has_active_common())
    throw InvalidArgument(std::string(who) + ": common precoder must be absent");
}

}  // namespace detail

/// Treat-interference-as-noise rates R_k = W log2(1 + gamma_k).
inline std::array<double, 2> sdma_rates(const PrecoderSet& p,
                                        const Scenario& s) {
  detail::check_dimensions(p, s);
  detail::require_no_common(p, "sdma_rates");
  std::array<double, 2> r{};
  for (int k = 0; k < 2; ++k) {
    const int j = 1 - k;
    const auto& h = s.channel(k);
    const double sinr = detail::gain(h, p.priv[k]) /
                        (detail::gain(h, p.priv[j]) + s.noise_power(k));
    r[k] = detail::rate(sinr, s.bandwidth());
  }
  return r;
}

/// Superposition coding with SIC. Returns rates indexed by user.
inline std::array<double, 2> noma_rates(const PrecoderSet& p,
                                        DecodingOrder order,
                                        const Scenario& s) {
  detail::check_dimensions(p, s);
  detail::require_no_common(p, "noma_rates");
  order.validate();
  const int a = order.first;
  const int b = order.second;
  const auto& ha = s.channel(a);
  const auto& hb = s.channel(b);
  const double sinr_a = detail::gain(ha, p.priv[a]) /
                        (detail::gain(ha, p.priv[b]) + s.noise_power(a));
  const double sinr_b_to_a = detail::gain(hb, p.priv[a]) /
                             (detail::gain(hb, p.priv[b]) + s.noise_power(b));
  const double sinr_b = detail::gain(hb, p.priv[b]) / s.noise_power(b);
  std::array<double, 2> r{};
  r[a] = std::min(detail::rate(sinr_a, s.bandwidth()),
                  detail::rate(sinr_b_to_a, s.bandwidth()));
  r[b] = detail::rate(sinr_b, s.bandwidth());
  return r;
}

/// Rate decomposition of a rate-splitting transmission.
struct RsmaRates {
  std::array<double, 2> common_rate_at_user{0.0, 0.0};  ///< R_{c,k}
  double common_rate = 0.0;                              ///< R_c = min_k R_{c,k}
  std::array<double, 2> private_rate{0.0, 0.0};          ///< R_k
  std::array<double, 2> total_rate{0.0, 0.0};            ///< C_k + R_k
};

/// Throws SplitExceedsCommonRate when C_1 + C_2 > R_c beyond tolerance.
inline RsmaRates rsma_rates(const PrecoderSet& p, const CommonRateSplit& split,
                            const Scenario& s) {
  detail::check_dimensions(p, s);
  if (!(split.c[0] >= 0.0) || !(split.c[1] >= 0.0))
    throw InvalidArgument("common rate shares must be nonnegative");
  RsmaRates out;
  const int nt = s.nt();
  const CVector zero = CVector::Zero(nt);
  const CVector& pc = p.common ? *p.common : zero;
  for (int k = 0; k < 2; ++k) {
    const auto& h = s.channel(k);
    const double g1 = detail::gain(h, p.priv[0]);
    const double g2 = detail::gain(h, p.priv[1]);
    const double sinr_c = detail::gain(h, pc) / (g1 + g2 + s.noise_power(k));
    out.common_rate_at_user[k] = detail::rate(sinr_c, s.bandwidth());
    const double own = k == 0 ? g1 : g2;
    const double other = k == 0 ? g2 : g1;
    out.private_rate[k] =
        detail::rate(own / (other + s.noise_power(k)), s.bandwidth());
  }
  out.common_rate =
      std::min(out.common_rate_at_user[0], out.common_rate_at_user[1]);
  if (split.sum() > out.common_rate + kSplitTolerance)
    throw SplitExceedsCommonRate(
        "common rate split " + std::to_string(split.sum()) +
        " exceeds decodable common rate " + std::to_string(out.common_rate));
  for (int k = 0; k < 2; ++k)
    out.total_rate[k] = split.c[k] + out.private_rate[k];
  return out;
}

/// Achievable per-user rates of a scheme point, plus R_c for RSMA.
inline RateReport evaluate_rates(const SchemePoint& point, const Scenario& s) {
  RateReport report;
  switch (point.scheme) {
    case Scheme::Sdma:
      report.per_user_rate = sdma_rates(point.precoders, s);
      break;
    case Scheme::Noma:
      report.per_user_rate = noma_rates(point.precoders, point.order, s);
      break;
    case Scheme::Rsma: {
      const auto r = rsma_rates(point.precoders, point.split, s);
      report.per_user_rate = r.total_rate;
      report.common_rate = r.common_rate;
      break;
    }
  }
  report.transmit_power = point.precoders.transmit_power();
  return report;
}

/// Full report: rates, weighted sum rate and EE = WSR / P_total.
inline RateReport evaluate(const SchemePoint& point, const WeightVector& u,
                           const Scenario& s) {
  u.validate();
  RateReport report = evaluate_rates(point, s);
  if (report.transmit_power > s.p_t() * (1.0 + kPowerTolerance))
    throw PowerBudgetViolation("transmit power " +
                               std::to_string(report.transmit_power) +
                               " exceeds budget " + std::to_string(s.p_t()));
  report.weighted_sum_rate =
      u.u1 * report.per_user_rate[0] + u.u2 * report.per_user_rate[1];
  report.energy_efficiency =
      report.weighted_sum_rate / total_power(report.transmit_power, s);
  return report;
}

inline double evaluate_ee(const SchemePoint& point, const WeightVector& u,
                          const Scenario& s) {
  return evaluate(point, u, s).energy_efficiency;
}

/// (EE_1, EE_2): each user's achievable rate over the total consumed power.
inline std::array<double, 2> individual_ee(const SchemePoint& point,
                                           const Scenario& s) {
  const RateReport r = evaluate(point, WeightVector{1.0, 1.0}, s);
  const double denom = total_power(r.transmit_power, s);
  return {r.per_user_rate[0] / denom, r.per_user_rate[1] / denom};
}

/// RSMA point with the common stream switched off and the same private
/// precoders; evaluates identically to the SDMA point.
inline SchemePoint embed_sdma_in_rsma(const SchemePoint& sdma) {
  if (sdma.scheme != Scheme::Sdma)
    throw InvalidArgument("embed_sdma_in_rsma: expected an SDMA point");
  SchemePoint out;
  out.scheme = Scheme::Rsma;
  out.precoders.priv = sdma.precoders.priv;
  out.precoders.common = CVector::Zero(sdma.precoders.priv[0].size());
  out.split = {};
  return out;
}

/// RSMA point carrying the first-decoded NOMA message on the common stream:
/// p_c = p_first, p_first = 0, C_first = R_first, C_second = 0.
inline SchemePoint embed_noma_in_rsma(const SchemePoint& noma,
                                      const Scenario& s) {
  if (noma.scheme != Scheme::Noma)
    throw InvalidArgument("embed_noma_in_rsma: expected a NOMA point");
  const auto rates = noma_rates(noma.precoders, noma.order, s);
  const int a = noma.order.first;
  SchemePoint out;
  out.scheme = Scheme::Rsma;
  out.precoders.common = noma.precoders.priv[a];
  out.precoders.priv = noma.precoders.priv;
  out.precoders.priv[a] = CVector::Zero(noma.precoders.priv[a].size());
  out.split.c[a] = rates[a];
  out.split.c[1 - a] = 0.0;
  return out;
}

}  // namespace eeopt
