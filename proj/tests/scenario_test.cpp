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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "eeopt/scenario.hpp"

namespace eeopt {
namespace {

TEST(ScenarioTest, DbmConversion) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(40.0), 10.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(0.0), 0.001);
}

TEST(ScenarioTest, DbmRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> exp10(-6.0, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, exp10(rng));
    EXPECT_NEAR(dbm_to_watts(watts_to_dbm(x)), x, 1e-12 * x);
  }
  EXPECT_THROW(watts_to_dbm(0.0), InvalidArgument);
}

TEST(ScenarioTest, AlignedChannels) {
  auto [h1, h2] = make_channels(1.0, 0.0, 4);
  EXPECT_TRUE(h1.isApprox(CVector::Ones(4)));
  EXPECT_TRUE(h2.isApprox(h1));
}

TEST(ScenarioTest, AngledChannels) {
  const double theta = 2.0 * kPi / 9.0;
  auto [h1, h2] = make_channels(1.0, theta, 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(h2[i] - std::polar(1.0, theta * i)), 0.0, 1e-15);
  }
}

TEST(ScenarioTest, OrthogonalChannels) {
  auto [h1, h2] = make_channels(0.3, kPi / 2.0, 4);
  EXPECT_NEAR(h2.norm(), 0.6, 1e-15);
  EXPECT_NEAR(std::abs(h1.dot(h2)), 0.0, 1e-15);
}

TEST(ScenarioTest, ChannelMagnitudes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> g(0.0, 2.0), th(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const double gamma = g(rng);
    const int nt = 1 + i % 6;
    auto [h1, h2] = make_channels(gamma, th(rng), nt);
    for (int k = 0; k < nt; ++k) EXPECT_NEAR(std::abs(h2[k]), gamma, 1e-14);
    EXPECT_NEAR(h2.squaredNorm(), nt * gamma * gamma, 1e-12);
  }
}

TEST(ScenarioTest, TotalPower) {
  auto s1 = make_scenario(1.0, 0.0, 4, {10.0, 0.35, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(total_power(0.0, s1), 5.0);
  auto s2 = make_scenario(1.0, 0.0, 4, {10.0, 0.35, 10.0, 1.0});
  EXPECT_NEAR(total_power(10.0, s2), 10.0 / 0.35 + 41.0, 1e-12);
  EXPECT_NEAR(total_power(10.0, s2), 69.571, 1e-3);
  auto s3 = make_scenario(1.0, 0.0, 4, {10.0, 1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(total_power(10.0, s3), 10.0);
  EXPECT_THROW(total_power(-1.0, s3), InvalidArgument);
}

TEST(ScenarioTest, TotalPowerIsAffineIncreasing) {
  auto s = make_scenario(1.0, 0.0, 4, {10.0, 0.35, 0.1, 1.0});
  const double slope = total_power(1.0, s) - total_power(0.0, s);
  EXPECT_NEAR(slope, 1.0 / 0.35, 1e-12);
  for (double p = 0.0; p < 10.0; p += 0.7) {
    EXPECT_GT(total_power(p + 0.1, s), total_power(p, s));
    EXPECT_NEAR(total_power(p, s), total_power(0.0, s) + slope * p, 1e-12);
  }
}

TEST(ScenarioTest, Validation) {
  PowerModel pm{10.0, 0.35, 1.0, 1.0};
  EXPECT_THROW(make_scenario(1.0, 0.0, 4, {10.0, 0.0, 1.0, 1.0}),
               InvalidScenario);
  EXPECT_THROW(make_scenario(1.0, 0.0, 4, {10.0, 1.2, 1.0, 1.0}),
               InvalidScenario);
  EXPECT_THROW(make_scenario(1.0, 0.0, 4, {10.0, 0.35, -1.0, 1.0}),
               InvalidScenario);
  EXPECT_THROW(Scenario({CVector::Zero(2), CVector::Zero(2)}, pm),
               InvalidScenario);
  EXPECT_THROW(Scenario({CVector::Ones(2), CVector::Ones(3)}, pm),
               InvalidScenario);
  EXPECT_THROW(Scenario({CVector::Ones(2), CVector::Ones(2)}, pm, {1.0, 0.0}),
               InvalidScenario);
  EXPECT_NO_THROW(Scenario({CVector::Ones(2), CVector::Zero(2)}, pm));
  EXPECT_THROW(make_channels(1.0, 0.0, 0), InvalidArgument);
}

TEST(ScenarioTest, WeightValidation) {
  EXPECT_NO_THROW((WeightVector{1.0, 0.0}.validate()));
  EXPECT_THROW((WeightVector{0.0, 0.0}.validate()), InvalidArgument);
  EXPECT_THROW((WeightVector{-1.0, 2.0}.validate()), InvalidArgument);
}

}  // namespace
}  // namespace eeopt
