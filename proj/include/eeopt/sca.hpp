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

// Successive convex approximation for energy-efficiency maximization.
//
// The fractional objective is rewritten in epigraph form with surrogate
// variables (omega^2 for the weighted sum rate, z for the consumed power,
// t for EE, alpha/theta/beta for rates, 1+SINR and interference-plus-noise).
// The three non-convex pieces, omega^2/z >= t and |h^H p|^2 / beta >=
// theta - 1 (private and common), are replaced by their first-order lower
// bounds at the current iterate, giving a conic subproblem per iteration.
//
// SDMA drops the common stream. NOMA with order (a, b) is the RSMA problem
// restricted to: the first-decoded message carried on the common stream,
// no private stream for a, and C_b = 0.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "eeopt/barrier.hpp"
#include "eeopt/conic.hpp"
#include "eeopt/scenario.hpp"
#include "eeopt/schemes.hpp"

namespace eeopt {

// ---------------------------------------------------------------------------
// Linearizations
// ---------------------------------------------------------------------------

/// Affine minorant of omega^2 / z at (omega_bar, z_bar):
/// (2 omega_bar / z_bar) omega - (omega_bar / z_bar)^2 z.
struct RatioBound {
  double omega_coef = 0.0;
  double z_coef = 0.0;

  double operator()(double omega, double z) const {
    return omega_coef * omega + z_coef * z;
  }
};

inline RatioBound linearize_ratio(double omega_bar, double z_bar) {
  if (!(z_bar > 0.0)) throw InvalidArgument("linearize_ratio: z_bar must be > 0");
  const double r = omega_bar / z_bar;
  return {2.0 * r, -r * r};
}

/// Affine minorant of |h^H p|^2 / beta at (p_bar, beta_bar):
/// 2 Re(p_bar^H h h^H p) / beta_bar - (|h^H p_bar| / beta_bar)^2 beta.
struct QuadOverLinBound {
  CVector h;
  cplx anchor;  ///< h^H p_bar
  double beta_bar = 1.0;

  /// Coefficient multiplying beta.
  double beta_coef() const {
    return -std::norm(anchor) / (beta_bar * beta_bar);
  }

  double operator()(const CVector& p, double beta) const {
    const cplx hp = h.dot(p);
    return 2.0 * (std::conj(anchor) * hp).real() / beta_bar + beta_coef() * beta;
  }
};

inline QuadOverLinBound linearize_qol(const CVector& p_bar, double beta_bar,
                                      const CVector& h) {
  if (!(beta_bar > 0.0))
    throw InvalidArgument("linearize_qol: beta_bar must be > 0");
  if (p_bar.size() != h.size())
    throw InvalidArgument("linearize_qol: dimension mismatch");
  return {h, h.dot(p_bar), beta_bar};
}

// ---------------------------------------------------------------------------
// Iterate state and subproblem
// ---------------------------------------------------------------------------

/// Which scheme, and for NOMA which decoding order.
struct SchemeSpec {
  Scheme scheme = Scheme::Rsma;
  DecodingOrder order;
};

/// Surrogate variables of one SCA iterate. Precoders use the RSMA layout
/// for every scheme: SDMA keeps a zero common vector, NOMA carries the
/// first-decoded message on the common vector.
struct IterateState {
  double omega = 0.0;
  double z = 0.0;
  double t = 0.0;
  std::array<double, 2> alpha{0.0, 0.0};
  std::array<double, 2> theta{1.0, 1.0};
  std::array<double, 2> beta{1.0, 1.0};
  std::array<double, 2> alpha_c{0.0, 0.0};
  std::array<double, 2> theta_c{1.0, 1.0};
  std::array<double, 2> beta_c{1.0, 1.0};
  PrecoderSet precoders;
  CommonRateSplit split;
};

/// Streams and split shares present in a subproblem.
struct StreamLayout {
  bool common = false;
  std::array<bool, 2> priv{true, true};
  std::array<bool, 2> split{false, false};
};

/// Below this common-stream SINR (at either user) the common stream is
/// switched off: its linearization has no interior to work with.
inline constexpr double kCommonSinrFloor = 1e-10;
/// Lower box on private-rate surrogates, in units of W (theta >= 2^-30).
inline constexpr double kAlphaFloor = 30.0;

inline StreamLayout stream_layout(const SchemeSpec& spec, const Scenario& s,
                                  const IterateState& st) {
  StreamLayout l;
  switch (spec.scheme) {
    case Scheme::Sdma:
      return l;
    case Scheme::Rsma:
      l.common = true;
      l.split = {true, true};
      break;
    case Scheme::Noma:
      spec.order.validate();
      l.common = true;
      l.priv[spec.order.first] = false;
      l.split[spec.order.first] = true;
      break;
  }
  if (l.common) {
    const CVector& pc = st.precoders.common ? *st.precoders.common
                                            : CVector::Zero(s.nt()).eval();
    for (int k = 0; k < 2; ++k) {
      const double sinr = detail::gain(s.channel(k), pc) / st.beta_c[k];
      if (!(sinr >= kCommonSinrFloor)) {
        l.common = false;
        l.split = {false, false};
        break;
      }
    }
  }
  return l;
}

/// Variable handles of a built subproblem.
struct SubproblemLayout {
  StreamLayout streams;
  /// Real-expanded precoders [re_0, im_0, re_1, ...]; index 0 is the common
  /// stream, 1 and 2 the private ones. Empty when the stream is inactive.
  std::array<std::vector<conic::Variable>, 3> precoder;
  conic::Variable omega, z, t;
  std::array<std::optional<conic::Variable>, 2> alpha, theta, beta;
  std::array<std::optional<conic::Variable>, 2> alpha_c, theta_c, beta_c;
  std::array<std::optional<conic::Variable>, 2> split;
  /// Auxiliary r >= 1/theta of the log inner approximation (fallback only).
  std::vector<conic::Variable> recip;
};

struct Subproblem {
  conic::ConicProgram program;
  SubproblemLayout layout;
  std::vector<double> hint;  ///< the current iterate in program coordinates
};

/// How theta >= 2^(alpha/W) reaches the backend.
enum class ExpHandling {
  Auto,                ///< native when the backend supports it, else inner
  Native,              ///< exponential cone
  InnerApproximation,  ///< alpha <= W/ln2 (ln th_bar + 1 - th_bar / theta)
};

namespace sca_detail {

/// Real and imaginary parts of h^H p as linear forms of the expanded p.
inline std::pair<conic::LinExpr, conic::LinExpr> inner_forms(
    const CVector& h, const std::vector<conic::Variable>& p) {
  conic::LinExpr re, im;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const auto x = p[static_cast<std::size_t>(2 * i)];
    const auto y = p[static_cast<std::size_t>(2 * i + 1)];
    re.add(x, h[i].real()).add(y, h[i].imag());
    im.add(y, h[i].real()).add(x, -h[i].imag());
  }
  return {re, im};
}

inline const CVector& stream(const PrecoderSet& p, int idx) {
  return idx == 0 ? *p.common : p.priv[idx - 1];
}

inline double beta_cap(const Scenario& s, int k) {
  return 2.0 * (s.noise_power(k) + s.p_t() * s.channel(k).squaredNorm()) + 1.0;
}

inline double z_cap(const Scenario& s) {
  return 2.0 * (s.p_t() / s.eta() + s.circuit_power()) + 1.0;
}

}  // namespace sca_detail

/// The convex subproblem at the iterate `st`.
inline Subproblem build_subproblem(const SchemeSpec& spec, const Scenario& s,
                                   const WeightVector& u, const IterateState& st,
                                   ExpHandling exp = ExpHandling::Native,
                                   const conic::BackendCapabilities& caps = {}) {
  using conic::LinExpr;
  using conic::Variable;
  u.validate();
  if (exp == ExpHandling::Auto)
    exp = caps.exponential_cone ? ExpHandling::Native
                                : ExpHandling::InnerApproximation;
  if (!(st.z > 0.0)) throw InvalidArgument("iterate z must be > 0");

  Subproblem sp;
  auto& prog = sp.program;
  auto& lay = sp.layout;
  lay.streams = stream_layout(spec, s, st);
  const auto& sl = lay.streams;
  const int nt = s.nt();
  const double w = s.bandwidth();

  static const char* kStreamName[3] = {"p_c", "p_1", "p_2"};
  const std::array<bool, 3> active{sl.common, sl.priv[0], sl.priv[1]};
  for (int i = 0; i < 3; ++i)
    if (active[i])
      lay.precoder[i] = prog.add_variables(kStreamName[i], 2 * static_cast<std::size_t>(nt));
  lay.omega = prog.add_variable("omega");
  lay.z = prog.add_variable("z");
  lay.t = prog.add_variable("t");
  for (int k = 0; k < 2; ++k) {
    if (!sl.priv[k]) continue;
    const std::string sfx = "_" + std::to_string(k + 1);
    lay.alpha[k] = prog.add_variable("alpha" + sfx);
    lay.theta[k] = prog.add_variable("theta" + sfx);
    lay.beta[k] = prog.add_variable("beta" + sfx);
  }
  if (sl.common) {
    for (int k = 0; k < 2; ++k) {
      const std::string sfx = "_c" + std::to_string(k + 1);
      lay.alpha_c[k] = prog.add_variable("alpha" + sfx);
      lay.theta_c[k] = prog.add_variable("theta" + sfx);
      lay.beta_c[k] = prog.add_variable("beta" + sfx);
    }
  }
  for (int k = 0; k < 2; ++k)
    if (sl.split[k]) lay.split[k] = prog.add_variable("C_" + std::to_string(k + 1));

  // Omega(omega, z) >= t
  const RatioBound ratio = linearize_ratio(st.omega, st.z);
  prog.add_nonnegative(ratio.omega_coef * lay.omega + ratio.z_coef * lay.z -
                           LinExpr(lay.t),
                       "ratio");

  // Psi(p, beta) >= theta - 1 for every decoded stream.
  auto add_sinr = [&](int stream_idx, int user, Variable theta, Variable beta,
                      double beta_bar, const char* label) {
    const auto& h = s.channel(user);
    const auto bound =
        linearize_qol(sca_detail::stream(st.precoders, stream_idx), beta_bar, h);
    auto [re, im] = sca_detail::inner_forms(h, lay.precoder[stream_idx]);
    LinExpr psi = (2.0 / beta_bar) * (bound.anchor.real() * re +
                                      bound.anchor.imag() * im);
    psi.add(beta, bound.beta_coef());
    prog.add_nonnegative(psi - LinExpr(theta) + 1.0, label);
  };
  for (int k = 0; k < 2; ++k)
    if (sl.priv[k])
      add_sinr(k + 1, k, *lay.theta[k], *lay.beta[k], st.beta[k],
               k == 0 ? "sinr_1" : "sinr_2");
  if (sl.common)
    for (int k = 0; k < 2; ++k)
      add_sinr(0, k, *lay.theta_c[k], *lay.beta_c[k], st.beta_c[k],
               k == 0 ? "sinr_c1" : "sinr_c2");

  // tr(PP^H) <= P_t and z >= tr(PP^H)/eta + P_cir
  std::vector<Variable> all;
  for (const auto& v : lay.precoder) all.insert(all.end(), v.begin(), v.end());
  conic::add_power_constraint(prog, all, s.p_t());
  {
    std::vector<LinExpr> entries(all.begin(), all.end());
    prog.add_rotated_quadratic(entries,
                               s.eta() * (LinExpr(lay.z) - s.circuit_power()),
                               LinExpr(1.0), "total_power");
  }

  // sum_k u_k (C_k + alpha_k) >= omega^2
  {
    LinExpr wsr;
    for (int k = 0; k < 2; ++k) {
      if (sl.priv[k]) wsr.add(*lay.alpha[k], u[k]);
      if (sl.split[k]) wsr.add(*lay.split[k], u[k]);
    }
    prog.add_rotated_quadratic({LinExpr(lay.omega)}, wsr, LinExpr(1.0), "wsr");
  }

  // theta >= 2^(alpha / W)
  auto add_link = [&](Variable alpha, Variable theta, double theta_bar,
                      const char* label) {
    if (exp == ExpHandling::Native) {
      conic::add_exp_rate_link(prog, alpha, theta, w, caps, label);
      return;
    }
    // ln(theta) >= ln(th_bar) + 1 - th_bar * r with r >= 1/theta.
    const Variable r = prog.add_variable(std::string("r_") + label);
    lay.recip.push_back(r);
    prog.add_rotated_quadratic({LinExpr(1.0)}, LinExpr(r), LinExpr(theta),
                               std::string("recip_") + label);
    const double scale = w / std::log(2.0);
    LinExpr rhs(scale * (std::log(theta_bar) + 1.0));
    rhs.add(r, -scale * theta_bar);
    prog.add_greater_equal(rhs, alpha, label);
  };
  for (int k = 0; k < 2; ++k)
    if (sl.priv[k])
      add_link(*lay.alpha[k], *lay.theta[k], st.theta[k],
               k == 0 ? "link_1" : "link_2");
  if (sl.common)
    for (int k = 0; k < 2; ++k)
      add_link(*lay.alpha_c[k], *lay.theta_c[k], st.theta_c[k],
               k == 0 ? "link_c1" : "link_c2");

  // beta_k >= N0 + interference of the other private stream
  for (int k = 0; k < 2; ++k) {
    if (!sl.priv[k]) continue;
    const int j = 1 - k;
    LinExpr slack = LinExpr(*lay.beta[k]) - s.noise_power(k);
    if (sl.priv[j]) {
      auto [re, im] = sca_detail::inner_forms(s.channel(k), lay.precoder[j + 1]);
      prog.add_rotated_quadratic({re, im}, slack, LinExpr(1.0),
                                 k == 0 ? "interf_1" : "interf_2");
    } else {
      prog.add_nonnegative(slack, k == 0 ? "interf_1" : "interf_2");
    }
  }
  // beta_c,k >= N0 + all private interference
  if (sl.common) {
    for (int k = 0; k < 2; ++k) {
      std::vector<LinExpr> forms;
      for (int j = 0; j < 2; ++j) {
        if (!sl.priv[j]) continue;
        auto [re, im] = sca_detail::inner_forms(s.channel(k), lay.precoder[j + 1]);
        forms.push_back(re);
        forms.push_back(im);
      }
      LinExpr slack = LinExpr(*lay.beta_c[k]) - s.noise_power(k);
      const char* label = k == 0 ? "interf_c1" : "interf_c2";
      if (forms.empty()) prog.add_nonnegative(slack, label);
      else prog.add_rotated_quadratic(forms, slack, LinExpr(1.0), label);
    }
    // C_1 + C_2 <= alpha_c,k
    LinExpr shares;
    for (int k = 0; k < 2; ++k)
      if (sl.split[k]) shares.add(*lay.split[k], 1.0);
    for (int k = 0; k < 2; ++k)
      prog.add_greater_equal(LinExpr(*lay.alpha_c[k]), shares,
                             k == 0 ? "share_1" : "share_2");
    for (int k = 0; k < 2; ++k)
      if (sl.split[k])
        prog.add_nonnegative(LinExpr(*lay.split[k]),
                             k == 0 ? "c_1_nonneg" : "c_2_nonneg");
  }

  // Implied bounds; they keep the barrier problem bounded in directions the
  // objective does not see (e.g. beta when a stream is silent).
  for (int k = 0; k < 2; ++k) {
    if (sl.priv[k]) {
      prog.add_greater_equal(LinExpr(sca_detail::beta_cap(s, k)), *lay.beta[k],
                             "beta_cap");
      prog.add_greater_equal(*lay.alpha[k], LinExpr(-kAlphaFloor * w),
                             "alpha_floor");
    }
    if (sl.common)
      prog.add_greater_equal(LinExpr(sca_detail::beta_cap(s, k)),
                             *lay.beta_c[k], "beta_c_cap");
  }
  prog.add_greater_equal(LinExpr(sca_detail::z_cap(s)), lay.z, "z_cap");

  prog.maximize(lay.t);

  // Hint: the current iterate.
  auto& x = sp.hint;
  x.assign(prog.num_variables(), 0.0);
  for (int i = 0; i < 3; ++i) {
    if (!active[i]) continue;
    const CVector& p = sca_detail::stream(st.precoders, i);
    for (int e = 0; e < nt; ++e) {
      x[lay.precoder[i][2 * e].index] = p[e].real();
      x[lay.precoder[i][2 * e + 1].index] = p[e].imag();
    }
  }
  x[lay.omega.index] = st.omega;
  x[lay.z.index] = st.z;
  x[lay.t.index] = std::min(st.t, ratio(st.omega, st.z)) -
                   1e-9 * (1.0 + std::abs(st.t));
  for (int k = 0; k < 2; ++k) {
    if (sl.priv[k]) {
      x[lay.alpha[k]->index] = st.alpha[k];
      x[lay.theta[k]->index] = st.theta[k];
      x[lay.beta[k]->index] = st.beta[k];
    }
    if (sl.common) {
      x[lay.alpha_c[k]->index] = st.alpha_c[k];
      x[lay.theta_c[k]->index] = st.theta_c[k];
      x[lay.beta_c[k]->index] = st.beta_c[k];
    }
    if (sl.split[k]) x[lay.split[k]->index] = st.split.c[k];
  }
  {
    std::size_t r = 0;
    auto fill = [&](double th) { x[lay.recip[r++].index] = 1.0 / th; };
    if (!lay.recip.empty()) {
      for (int k = 0; k < 2; ++k)
        if (sl.priv[k]) fill(st.theta[k]);
      if (sl.common)
        for (int k = 0; k < 2; ++k) fill(st.theta_c[k]);
    }
  }
  return sp;
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

/// Completes an iterate from precoders and split by turning the surrogate
/// inequalities into equalities.
inline IterateState state_from_point(const SchemeSpec& spec, const Scenario& s,
                                     const WeightVector& u, PrecoderSet p,
                                     CommonRateSplit split) {
  IterateState st;
  if (!p.common) p.common = CVector::Zero(s.nt());
  if (spec.scheme == Scheme::Sdma) {
    p.common->setZero();
    split = {};
  }
  if (spec.scheme == Scheme::Noma) {
    p.priv[spec.order.first].setZero();
    split.c[spec.order.second] = 0.0;
  }
  const double w = s.bandwidth();
  for (int k = 0; k < 2; ++k) {
    const auto& h = s.channel(k);
    const double g1 = detail::gain(h, p.priv[0]);
    const double g2 = detail::gain(h, p.priv[1]);
    const double own = k == 0 ? g1 : g2;
    const double other = k == 0 ? g2 : g1;
    st.beta[k] = s.noise_power(k) + other;
    st.theta[k] = 1.0 + own / st.beta[k];
    st.alpha[k] = w * std::log2(st.theta[k]);
    st.beta_c[k] = s.noise_power(k) + g1 + g2;
    st.theta_c[k] = 1.0 + detail::gain(h, *p.common) / st.beta_c[k];
    st.alpha_c[k] = w * std::log2(st.theta_c[k]);
  }
  const double rc = std::min(st.alpha_c[0], st.alpha_c[1]);
  for (auto& c : split.c) c = std::max(c, 0.0);
  if (split.sum() > rc) {
    const double f = split.sum() > 0.0 ? rc / split.sum() : 0.0;
    for (auto& c : split.c) c *= f;
  }
  double wsr = 0.0;
  for (int k = 0; k < 2; ++k) wsr += u[k] * (split.c[k] + st.alpha[k]);
  st.omega = std::sqrt(std::max(wsr, 0.0));
  st.z = total_power(p.transmit_power(), s);
  st.t = st.omega * st.omega / st.z;
  st.precoders = std::move(p);
  st.split = split;
  return st;
}

namespace sca_detail {

inline CVector unit_or(const CVector& v, int nt) {
  const double n = v.norm();
  if (n > 0.0) return v / n;
  CVector e = CVector::Zero(nt);
  e[0] = 1.0;
  return e;
}

}  // namespace sca_detail

/// Matched-filter start: private streams along their own channels, the
/// common stream (and NOMA's first-decoded message) along h_1 + h_2, equal
/// power per stream so that the budget is met with equality. RSMA splits
/// the common rate evenly.
inline IterateState initialize(const SchemeSpec& spec, const Scenario& s,
                               const WeightVector& u) {
  const int nt = s.nt();
  const auto& h1 = s.channel(0);
  const auto& h2 = s.channel(1);
  if (h1.squaredNorm() == 0.0 && h2.squaredNorm() == 0.0)
    throw DegenerateChannel("both channels are zero");
  const CVector sum = h1 + h2;
  const CVector dir_c = sca_detail::unit_or(
      sum.norm() > 0.0 ? sum : (h1.norm() > 0.0 ? h1 : h2), nt);
  std::array<CVector, 2> dir{sca_detail::unit_or(h1.norm() > 0 ? h1 : h2, nt),
                             sca_detail::unit_or(h2.norm() > 0 ? h2 : h1, nt)};

  PrecoderSet p = PrecoderSet::zeros(nt, true);
  CommonRateSplit split;
  switch (spec.scheme) {
    case Scheme::Sdma: {
      const double a = std::sqrt(s.p_t() / 2.0);
      p.priv = {a * dir[0], a * dir[1]};
      break;
    }
    case Scheme::Rsma: {
      const double a = std::sqrt(s.p_t() / 3.0);
      p.common = a * dir_c;
      p.priv = {a * dir[0], a * dir[1]};
      break;
    }
    case Scheme::Noma: {
      spec.order.validate();
      const double a = std::sqrt(s.p_t() / 2.0);
      p.common = a * dir_c;
      p.priv[spec.order.second] = a * dir[spec.order.second];
      break;
    }
  }
  // Provisional shares; state_from_point clips them to R_c.
  if (spec.scheme == Scheme::Rsma) {
    split.c = {std::numeric_limits<double>::max() / 4,
               std::numeric_limits<double>::max() / 4};
  } else if (spec.scheme == Scheme::Noma) {
    split.c[spec.order.first] = std::numeric_limits<double>::max() / 4;
  }
  return state_from_point(spec, s, u, std::move(p), split);
}

// ---------------------------------------------------------------------------
// Algorithm loop
// ---------------------------------------------------------------------------

struct TraceEntry {
  int iteration = 0;
  double t = 0.0;               ///< subproblem optimum (t^[0] at the start)
  double wsr = 0.0;             ///< forward-model WSR of the iterate
  double transmit_power = 0.0;  ///< tr(PP^H) of the iterate [W]
  std::string status;           ///< "init" or the conic status
};

struct SolveResult {
  SchemePoint point;
  double ee = 0.0;
  double wsr = 0.0;
  double transmit_power = 0.0;
  RateReport report;
  std::vector<TraceEntry> trace;
  int iterations = 0;
  bool converged = false;
  int start_index = 0;  ///< which start produced this result

  Scheme scheme() const { return point.scheme; }
  std::vector<double> t_trace() const {
    std::vector<double> v;
    v.reserve(trace.size());
    for (const auto& e : trace) v.push_back(e.t);
    return v;
  }
};

struct ScaOptions {
  double epsilon = 1e-4;  ///< stop when |t^[n] - t^[n-1]| < epsilon [bit/J]
  int max_iter = 100;
  /// Random starts in addition to the matched-filter one.
  int extra_starts = 1;
  std::uint64_t seed = 0;
  bool default_start = true;
  /// Feasible points (in the scheme's own representation, or RSMA points
  /// for an RSMA solve) used as additional starts.
  std::vector<SchemePoint> warm_starts;
  ExpHandling exp_handling = ExpHandling::Auto;
  const conic::Backend* backend = nullptr;  ///< nullptr: built-in barrier
};

inline const conic::Backend& default_backend() {
  static const conic::BarrierSolver solver;
  return solver;
}

namespace sca_detail {

/// Converts an iterate into a point of the requested scheme.
inline SchemePoint to_point(const SchemeSpec& spec, const IterateState& st) {
  SchemePoint pt;
  pt.scheme = spec.scheme;
  pt.order = spec.order;
  switch (spec.scheme) {
    case Scheme::Rsma:
      pt.precoders = st.precoders;
      pt.split = st.split;
      break;
    case Scheme::Sdma:
      pt.precoders.priv = st.precoders.priv;
      break;
    case Scheme::Noma:
      pt.precoders.priv = st.precoders.priv;
      pt.precoders.priv[spec.order.first] = *st.precoders.common;
      break;
  }
  return pt;
}

/// Maps a warm-start point into the RSMA-layout precoders and split.
inline std::pair<PrecoderSet, CommonRateSplit> from_point(
    const SchemeSpec& spec, const SchemePoint& pt, const Scenario& s) {
  if (pt.scheme == Scheme::Noma && spec.scheme != Scheme::Noma) {
    auto e = embed_noma_in_rsma(pt, s);
    return {e.precoders, e.split};
  }
  if (spec.scheme == Scheme::Noma) {
    if (pt.scheme != Scheme::Noma || !(pt.order == spec.order))
      throw InvalidArgument("NOMA warm start must use the same decoding order");
    auto e = embed_noma_in_rsma(pt, s);
    return {e.precoders, e.split};
  }
  PrecoderSet p = pt.precoders;
  if (!p.common) p.common = CVector::Zero(s.nt());
  return {p, pt.split};
}

inline IterateState extract(const SchemeSpec& spec, const Scenario& s,
                            const Subproblem& sp, const conic::SolveStatus& r) {
  const auto& lay = sp.layout;
  const int nt = s.nt();
  IterateState st;
  st.precoders = PrecoderSet::zeros(nt, true);
  for (int i = 0; i < 3; ++i) {
    if (lay.precoder[i].empty()) continue;
    CVector p(nt);
    for (int e = 0; e < nt; ++e)
      p[e] = cplx(r.value(lay.precoder[i][2 * e]),
                  r.value(lay.precoder[i][2 * e + 1]));
    if (i == 0) st.precoders.common = p;
    else st.precoders.priv[i - 1] = p;
  }
  st.omega = r.value(lay.omega);
  st.z = r.value(lay.z);
  st.t = r.value(lay.t);
  // Inactive streams take their exact (equality) values.
  const IterateState exact =
      state_from_point(spec, s, WeightVector{1.0, 1.0}, st.precoders, {});
  for (int k = 0; k < 2; ++k) {
    if (lay.alpha[k]) {
      st.alpha[k] = r.value(*lay.alpha[k]);
      st.theta[k] = r.value(*lay.theta[k]);
      st.beta[k] = r.value(*lay.beta[k]);
    } else {
      st.alpha[k] = exact.alpha[k];
      st.theta[k] = exact.theta[k];
      st.beta[k] = exact.beta[k];
    }
    if (lay.alpha_c[k]) {
      st.alpha_c[k] = r.value(*lay.alpha_c[k]);
      st.theta_c[k] = r.value(*lay.theta_c[k]);
      st.beta_c[k] = r.value(*lay.beta_c[k]);
    } else {
      st.alpha_c[k] = exact.alpha_c[k];
      st.theta_c[k] = exact.theta_c[k];
      st.beta_c[k] = exact.beta_c[k];
    }
    st.split.c[k] = lay.split[k] ? std::max(0.0, r.value(*lay.split[k])) : 0.0;
  }
  // Guard the forward-model split check against round-off.
  const double rc = std::min(exact.alpha_c[0], exact.alpha_c[1]);
  if (st.split.sum() > rc) {
    const double f = st.split.sum() > 0.0 ? rc / st.split.sum() : 0.0;
    for (auto& c : st.split.c) c *= f;
  }
  return st;
}

/// splitmix64
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Small deterministic generator, identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}
  double uniform() {
    state_ = mix(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Randomized start: matched-filter directions perturbed by complex
/// Gaussian noise, random power share per stream and random total power.
inline IterateState random_start(const SchemeSpec& spec, const Scenario& s,
                                 const WeightVector& u, std::uint64_t seed) {
  const IterateState base = initialize(spec, s, u);
  Rng rng(seed);
  const int nt = s.nt();
  // Streams in role order: common, then private streams.
  std::vector<CVector*> roles;
  PrecoderSet p = base.precoders;
  if (spec.scheme != Scheme::Sdma) roles.push_back(&*p.common);
  if (spec.scheme == Scheme::Noma) {
    roles.push_back(&p.priv[spec.order.second]);
  } else {
    roles.push_back(&p.priv[0]);
    roles.push_back(&p.priv[1]);
  }
  std::vector<double> share(roles.size());
  double total = 0.0;
  for (auto& v : share) {
    v = -std::log(std::max(rng.uniform(), 1e-300));
    total += v;
  }
  const double budget = s.p_t() * (0.1 + 0.9 * rng.uniform());
  for (std::size_t i = 0; i < roles.size(); ++i) {
    CVector g(nt);
    for (int e = 0; e < nt; ++e) g[e] = cplx(rng.normal(), rng.normal());
    CVector d = roles[i]->normalized() + g / std::sqrt(2.0 * nt);
    d = unit_or(d, nt);
    *roles[i] = std::sqrt(budget * share[i] / total) * d;
  }
  CommonRateSplit split;
  const double f = rng.uniform();
  if (spec.scheme == Scheme::Rsma) {
    split.c = {f * 1e300, (1.0 - f) * 1e300};
  } else if (spec.scheme == Scheme::Noma) {
    split.c[spec.order.first] = 1e300;
  }
  return state_from_point(spec, s, u, std::move(p), split);
}

}  // namespace sca_detail

/// Runs the SCA loop from one starting iterate.
inline SolveResult sca_run(const SchemeSpec& spec, const Scenario& s,
                           const WeightVector& u, IterateState state,
                           const ScaOptions& opt) {
  u.validate();
  if (!(opt.epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (opt.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  const conic::Backend& backend = opt.backend ? *opt.backend : default_backend();
  const auto caps = backend.capabilities();

  // The optimal precoders do not depend on the weight scale, so the
  // subproblems see weights normalized to max 1; t is reported unscaled.
  const double scale = std::max(u.u1, u.u2);
  const WeightVector un{u.u1 / scale, u.u2 / scale};
  state.omega /= std::sqrt(scale);
  state.t /= scale;

  SolveResult res;
  auto record = [&](int n, double t, const IterateState& st, std::string status) {
    const SchemePoint pt = sca_detail::to_point(spec, st);
    const RateReport rep = evaluate(pt, u, s);
    res.trace.push_back({n, t, rep.weighted_sum_rate, rep.transmit_power,
                         std::move(status)});
  };
  record(0, state.t * scale, state, "init");

  double t_prev = state.t * scale;
  for (int n = 1; n <= opt.max_iter; ++n) {
    const Subproblem sp =
        build_subproblem(spec, s, un, state, opt.exp_handling, caps);
    const conic::SolveStatus r = backend.solve(sp.program, sp.hint);
    if (!r.optimal())
      throw SubproblemFailure(n, conic::to_string(r.status));
    state = sca_detail::extract(spec, s, sp, r);
    state.t = r.objective_value;
    const double t_n = r.objective_value * scale;
    record(n, t_n, state, conic::to_string(r.status));
    res.iterations = n;
    if (std::abs(t_n - t_prev) < opt.epsilon) {
      res.converged = true;
      break;
    }
    t_prev = t_n;
  }
  res.point = sca_detail::to_point(spec, state);
  res.report = evaluate(res.point, u, s);
  res.ee = res.report.energy_efficiency;
  res.wsr = res.report.weighted_sum_rate;
  res.transmit_power = res.report.transmit_power;
  return res;
}

/// SCA with the configured starts; returns the best result by EE (ties
/// keep the earlier start). Starts: matched filter, warm starts, then
/// seeded random starts.
inline SolveResult sca_solve(const SchemeSpec& spec, const Scenario& s,
                             const WeightVector& u, const ScaOptions& opt = {}) {
  u.validate();
  std::vector<IterateState> starts;
  if (opt.default_start) starts.push_back(initialize(spec, s, u));
  for (const auto& w : opt.warm_starts) {
    auto [p, c] = sca_detail::from_point(spec, w, s);
    if (p.transmit_power() > s.p_t() * (1.0 + kPowerTolerance))
      throw PowerBudgetViolation("warm start exceeds the power budget");
    starts.push_back(state_from_point(spec, s, u, std::move(p), c));
  }
  for (int i = 0; i < opt.extra_starts; ++i)
    starts.push_back(sca_detail::random_start(
        spec, s, u, opt.seed * 1000003ULL + static_cast<std::uint64_t>(i) + 1));
  if (starts.empty()) throw InvalidArgument("sca_solve: no starting point");

  std::optional<SolveResult> best;
  std::optional<SubproblemFailure> first_failure;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      SolveResult r = sca_run(spec, s, u, starts[i], opt);
      r.start_index = static_cast<int>(i);
      if (!best || r.ee > best->ee) best = std::move(r);
    } catch (const SubproblemFailure& e) {
      if (!first_failure) first_failure = e;
    }
  }
  if (!best) throw *first_failure;
  return *best;
}

/// Relative margin by which order (2,1) must beat order (1,2).
inline constexpr double kOrderTieTolerance = 1e-7;

/// NOMA: both decoding orders, the better one wins; ties go to (1,2).
inline SolveResult solve_noma(const Scenario& s, const WeightVector& u,
                              const ScaOptions& opt = {}) {
  auto only_order = [&](DecodingOrder o) {
    ScaOptions o2 = opt;
    o2.warm_starts.clear();
    for (const auto& w : opt.warm_starts)
      if (w.scheme == Scheme::Noma && w.order == o) o2.warm_starts.push_back(w);
    return o2;
  };
  std::optional<SolveResult> r12, r21;
  std::optional<SubproblemFailure> failure;
  try {
    r12 = sca_solve({Scheme::Noma, DecodingOrder::natural()}, s, u,
                    only_order(DecodingOrder::natural()));
  } catch (const SubproblemFailure& e) {
    failure = e;
  }
  try {
    r21 = sca_solve({Scheme::Noma, DecodingOrder::reversed()}, s, u,
                    only_order(DecodingOrder::reversed()));
  } catch (const SubproblemFailure& e) {
    if (!failure) failure = e;
  }
  if (!r12 && !r21) throw *failure;
  if (!r12) return *r21;
  if (!r21) return *r12;
  return r21->ee > r12->ee * (1.0 + kOrderTieTolerance) ? *r21 : *r12;
}

/// Dispatches to sca_solve or solve_noma.
inline SolveResult solve_scheme(Scheme scheme, const Scenario& s,
                                const WeightVector& u,
                                const ScaOptions& opt = {}) {
  if (scheme == Scheme::Noma) return solve_noma(s, u, opt);
  return sca_solve({scheme, {}}, s, u, opt);
}

}  // namespace eeopt
