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

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "eeopt/errors.hpp"

namespace eeopt {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Converts a power level in dBm to watts.
inline double dbm_to_watts(double value_dbm) {
  return std::pow(10.0, (value_dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) throw InvalidArgument("watts_to_dbm: power must be > 0");
  return 10.0 * std::log10(watts) + 30.0;
}

/// Two-user test channels: h1 is all ones, h2 = gamma * [1, e^{j theta}, ...].
/// gamma sets the gain disparity and theta the angle between the users.
inline std::pair<CVector, CVector> make_channels(double gamma, double theta,
                                                 int nt) {
  if (nt < 1) throw InvalidArgument("make_channels: nt must be >= 1");
  CVector h1 = CVector::Ones(nt);
  CVector h2(nt);
  for (int i = 0; i < nt; ++i) h2[i] = gamma * std::polar(1.0, theta * i);
  return {std::move(h1), std::move(h2)};
}

/// Linear power-consumption model of the base station.
struct PowerModel {
  double p_t = 10.0;    ///< transmit power budget [W]
  double eta = 0.35;    ///< power amplifier efficiency, in (0, 1]
  double p_dyn = 1.0;   ///< dynamic power per RF chain [W]
  double p_sta = 1.0;   ///< static power [W]
};

/// One two-user MISO downlink problem instance. Immutable once built.
class Scenario {
 public:
  Scenario(std::array<CVector, 2> channels, PowerModel power,
           std::array<double, 2> noise_power = {1.0, 1.0},
           double bandwidth = 1.0)
      : channels_(std::move(channels)),
        power_(power),
        noise_power_(noise_power),
        bandwidth_(bandwidth) {
    validate();
  }

  int nt() const { return static_cast<int>(channels_[0].size()); }
  const CVector& channel(int user) const { return channels_.at(user); }
  double noise_power(int user) const { return noise_power_.at(user); }
  double bandwidth() const { return bandwidth_; }
  double p_t() const { return power_.p_t; }
  double eta() const { return power_.eta; }
  double p_dyn() const { return power_.p_dyn; }
  double p_sta() const { return power_.p_sta; }
  const PowerModel& power_model() const { return power_; }

  /// P_cir = nt * P_dyn + P_sta.
  double circuit_power() const { return nt() * power_.p_dyn + power_.p_sta; }

 private:
  void validate() const {
    const auto n = channels_[0].size();
    if (n < 1) throw InvalidScenario("channels must have at least one entry");
    if (channels_[1].size() != n)
      throw InvalidScenario("channel vectors must have equal length");
    for (const auto& h : channels_)
      if (!h.allFinite()) throw InvalidScenario("channel entries must be finite");
    if (channels_[0].squaredNorm() == 0.0 && channels_[1].squaredNorm() == 0.0)
      throw InvalidScenario("at least one channel must be nonzero");
    for (double n0 : noise_power_)
      if (!(n0 > 0.0) || !std::isfinite(n0))
        throw InvalidScenario("noise power must be positive");
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_))
      throw InvalidScenario("bandwidth must be positive");
    if (!(power_.p_t > 0.0) || !std::isfinite(power_.p_t))
      throw InvalidScenario("p_t must be positive");
    if (!(power_.eta > 0.0 && power_.eta <= 1.0))
      throw InvalidScenario("eta must be in (0,1]");
    if (!(power_.p_dyn >= 0.0) || !(power_.p_sta >= 0.0) ||
        !std::isfinite(power_.p_dyn) || !std::isfinite(power_.p_sta))
      throw InvalidScenario("p_dyn and p_sta must be nonnegative");
  }

  std::array<CVector, 2> channels_;
  PowerModel power_;
  std::array<double, 2> noise_power_;
  double bandwidth_;
};

/// Builds the standard two-user scenario from the channel-model parameters.
inline Scenario make_scenario(double gamma, double theta, int nt,
                              PowerModel power, double bandwidth = 1.0,
                              double noise_variance = 1.0) {
  auto [h1, h2] = make_channels(gamma, theta, nt);
  const double n0 = bandwidth * noise_variance;
  return Scenario({std::move(h1), std::move(h2)}, power, {n0, n0}, bandwidth);
}

/// P_total = P_tran / eta + P_cir.
inline double total_power(double transmit_power, const Scenario& s) {
  if (!(transmit_power >= 0.0))
    throw InvalidArgument("total_power: transmit power must be >= 0");
  return transmit_power / s.eta() + s.circuit_power();
}

/// Rate weights (u1, u2).
struct WeightVector {
  double u1 = 1.0;
  double u2 = 1.0;

  double operator[](int user) const { return user == 0 ? u1 : u2; }

  void validate() const {
    if (!(u1 >= 0.0) || !(u2 >= 0.0) || !std::isfinite(u1) ||
        !std::isfinite(u2))
      throw InvalidArgument("weights must be finite and nonnegative");
    if (!(u1 + u2 > 0.0)) throw InvalidArgument("weights must not both be zero");
  }
};

}  // namespace eeopt
