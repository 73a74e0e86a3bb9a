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

// JSON configuration and result serialization, CSV writers.
//
// Numbers in CSV output use std::to_chars (shortest round-trip form), so
// the files do not depend on the C or C++ locale.

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "eeopt/oracle.hpp"
#include "eeopt/region.hpp"
#include "eeopt/sca.hpp"

namespace eeopt {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// Shortest decimal form that round-trips; "nan"/"inf"/"-inf" otherwise.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

/// Parses a whole string as a double; no locale, no trailing garbage.
inline double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last)
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  return v;
}

/// Radians, or a multiple of pi written as "pi", "-pi/4", "2pi/9",
/// "0.5pi", "2*pi/9".
inline double parse_angle(std::string_view text) {
  const auto pos = text.find("pi");
  if (pos == std::string_view::npos) return parse_double(text);
  std::string_view coef = text.substr(0, pos);
  std::string_view rest = text.substr(pos + 2);
  if (!coef.empty() && coef.back() == '*') coef.remove_suffix(1);
  double k = 1.0;
  if (coef == "-") k = -1.0;
  else if (!coef.empty() && coef != "+") k = parse_double(coef);
  double d = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/')
      throw InvalidArgument("bad angle: '" + std::string(text) + "'");
    d = parse_double(rest.substr(1));
    if (d == 0.0) throw InvalidArgument("bad angle: division by zero");
  }
  return k * kPi / d;
}

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

/// Scenario inputs as given by a user; powers in dBm.
struct ScenarioConfig {
  int nt = 4;
  double gamma = 1.0;
  double theta = 2.0 * kPi / 9.0;
  double p_t_dbm = 40.0;
  double p_dyn_dbm = 27.0;
  double p_sta_dbm = 30.0;
  double eta = 0.35;
  double bandwidth_hz = 1.0;
  std::array<double, 2> noise_power{1.0, 1.0};
  /// Explicit channels; when set, nt/gamma/theta are not used.
  std::optional<std::array<CVector, 2>> channels;

  PowerModel power_model() const {
    return {dbm_to_watts(p_t_dbm), eta, dbm_to_watts(p_dyn_dbm),
            dbm_to_watts(p_sta_dbm)};
  }

  Scenario build() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidScenario("eta must be in (0,1]");
    if (channels) return Scenario(*channels, power_model(), noise_power, bandwidth_hz);
    auto [h1, h2] = make_channels(gamma, theta, nt);
    return Scenario({std::move(h1), std::move(h2)}, power_model(), noise_power,
                    bandwidth_hz);
  }
};

inline const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys{
      "nt",  "gamma",        "theta",       "p_t_dbm",  "p_dyn_dbm",
      "p_sta_dbm", "eta", "bandwidth_hz", "noise_power", "channels"};
  return keys;
}

namespace io_detail {

inline double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw InvalidArgument("'" + key + "' must be a number");
  return j.get<double>();
}

inline CVector channel(const json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidArgument("channel must be a nonempty array of [re, im] pairs");
  CVector h(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw InvalidArgument("channel entries must be [re, im] pairs");
    h[static_cast<Eigen::Index>(i)] = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return h;
}

inline json complex_vector(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

}  // namespace io_detail

/// Applies one scenario key; returns false when `key` is not a scenario key.
inline bool apply_scenario_key(ScenarioConfig& c, const std::string& key,
                               const json& v) {
  using io_detail::number;
  if (key == "nt") {
    if (!v.is_number_integer()) throw InvalidArgument("'nt' must be an integer");
    c.nt = v.get<int>();
  } else if (key == "gamma") {
    c.gamma = number(v, key);
  } else if (key == "theta") {
    c.theta = v.is_string() ? parse_angle(v.get<std::string>()) : number(v, key);
  } else if (key == "p_t_dbm") {
    c.p_t_dbm = number(v, key);
  } else if (key == "p_dyn_dbm") {
    c.p_dyn_dbm = number(v, key);
  } else if (key == "p_sta_dbm") {
    c.p_sta_dbm = number(v, key);
  } else if (key == "eta") {
    c.eta = number(v, key);
  } else if (key == "bandwidth_hz") {
    c.bandwidth_hz = number(v, key);
  } else if (key == "noise_power") {
    if (!v.is_array() || v.size() != 2)
      throw InvalidArgument("'noise_power' must be an array of 2 numbers");
    c.noise_power = {number(v[0], key), number(v[1], key)};
  } else if (key == "channels") {
    if (!v.is_array() || v.size() != 2)
      throw InvalidArgument("'channels' must hold exactly two vectors");
    c.channels = std::array<CVector, 2>{io_detail::channel(v[0]),
                                        io_detail::channel(v[1])};
  } else {
    return false;
  }
  return true;
}

/// Strict parse: unknown keys are rejected.
inline ScenarioConfig scenario_config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario configuration must be an object");
  ScenarioConfig c;
  for (const auto& [key, v] : j.items())
    if (!apply_scenario_key(c, key, v))
      throw InvalidArgument("unknown configuration key '" + key + "'");
  return c;
}

inline Scenario scenario_from_json(const json& j) {
  return scenario_config_from_json(j).build();
}

// ---------------------------------------------------------------------------
// Result serialization
// ---------------------------------------------------------------------------

inline json to_json(const RateReport& r) {
  return {{"rate_user1", r.per_user_rate[0]},
          {"rate_user2", r.per_user_rate[1]},
          {"common_rate", r.common_rate ? json(*r.common_rate) : json(nullptr)},
          {"wsr", r.weighted_sum_rate},
          {"ee", r.energy_efficiency},
          {"power_w", r.transmit_power}};
}

inline json to_json(const SchemePoint& p) {
  json j{{"scheme", std::string(to_string(p.scheme))}};
  json priv = json::array();
  for (const auto& v : p.precoders.priv) priv.push_back(io_detail::complex_vector(v));
  j["private_precoders"] = std::move(priv);
  if (p.scheme == Scheme::Rsma) {
    j["common_precoder"] = p.precoders.common
                               ? io_detail::complex_vector(*p.precoders.common)
                               : json(nullptr);
    j["common_split"] = {p.split.c[0], p.split.c[1]};
  }
  if (p.scheme == Scheme::Noma)
    j["order"] = {p.order.first + 1, p.order.second + 1};
  return j;
}

inline json to_json(const SolveResult& r) {
  json trace = json::array();
  for (const auto& e : r.trace)
    trace.push_back({{"iteration", e.iteration},
                     {"t", e.t},
                     {"wsr", e.wsr},
                     {"power_w", e.transmit_power},
                     {"status", e.status}});
  json j{{"scheme", std::string(to_string(r.scheme()))},
         {"converged", r.converged},
         {"iterations", r.iterations},
         {"ee", r.ee},
         {"wsr", r.wsr},
         {"power_w", r.transmit_power},
         {"report", to_json(r.report)},
         {"point", to_json(r.point)},
         {"start_index", r.start_index},
         {"trace", std::move(trace)}};
  if (r.scheme() == Scheme::Noma)
    j["order"] = {r.point.order.first + 1, r.point.order.second + 1};
  return j;
}

inline json to_json(const OracleResult& r) {
  return {{"best_ee", r.best_ee},
          {"best_point", to_json(r.best_point)},
          {"census", r.census},
          {"wall_time", r.wall_seconds}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Writes comma-separated rows; fields are numbers or plain tokens.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& field(double x) { return raw(format_double(x)); }
  CsvWriter& field(int x) { return raw(std::to_string(x)); }
  CsvWriter& field(bool x) { return raw(x ? "true" : "false"); }
  CsvWriter& field(std::string_view s) { return raw(s); }
  CsvWriter& field(const char* s) { return raw(s); }

  void end_row() {
    os_ << '\n';
    first_ = true;
  }

  void row(std::initializer_list<std::string_view> cells) {
    for (auto c : cells) raw(c);
    end_row();
  }

 private:
  CsvWriter& raw(std::string_view s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }

  std::ostream& os_;
  bool first_ = true;
};

inline constexpr std::string_view kRegionHeader =
    "scheme,gamma,theta,p_dyn_dbm,u2,ee1,ee2,wsr,power_w,iterations,converged";

/// One row per point; failed points carry nan metrics and converged=false.
inline void write_region_rows(CsvWriter& w, const RegionBoundary& b,
                              double gamma, double theta, double p_dyn_dbm) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : b.points) {
    w.field(to_string(b.scheme)).field(gamma).field(theta).field(p_dyn_dbm).field(p.u2);
    if (p.valid)
      w.field(p.ee1).field(p.ee2).field(p.wsr).field(p.power_w);
    else
      w.field(nan).field(nan).field(nan).field(nan);
    w.field(p.iterations).field(p.valid && p.converged);
    w.end_row();
  }
}

inline constexpr std::string_view kTraceHeader = "iteration,t,wsr,power_w,status";
inline constexpr std::string_view kConvergenceHeader =
    "scheme,p_dyn_dbm,iteration,t,wsr,power_w,status";

inline void write_trace(std::ostream& os, const SolveResult& r) {
  CsvWriter w(os);
  os << kTraceHeader << '\n';
  for (const auto& e : r.trace) {
    w.field(e.iteration).field(e.t).field(e.wsr).field(e.transmit_power).field(e.status);
    w.end_row();
  }
}

inline void write_convergence_rows(CsvWriter& w, const SolveResult& r,
                                   double p_dyn_dbm) {
  for (const auto& e : r.trace) {
    w.field(to_string(r.scheme())).field(p_dyn_dbm).field(e.iteration).field(e.t);
    w.field(e.wsr).field(e.transmit_power).field(e.status);
    w.end_row();
  }
}

}  // namespace eeopt
