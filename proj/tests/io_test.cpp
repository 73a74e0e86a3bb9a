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

#include <clocale>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "eeopt/io.hpp"

namespace eeopt {
namespace {

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  for (double x : {kPi, 1.0 / 3.0, 396.15209712345, 6.02e23})
    EXPECT_EQ(parse_double(format_double(x)), x);
}

TEST(FormatTest, ParseDoubleIsStrict) {
  EXPECT_EQ(parse_double("+3"), 3.0);
  EXPECT_THROW(parse_double(""), InvalidArgument);
  EXPECT_THROW(parse_double("1.5x"), InvalidArgument);
  EXPECT_THROW(parse_double("1,5"), InvalidArgument);
}

TEST(AngleTest, SymbolicAndNumeric) {
  EXPECT_DOUBLE_EQ(parse_angle("2pi/9"), 2.0 * kPi / 9.0);
  EXPECT_DOUBLE_EQ(parse_angle("pi/3"), kPi / 3.0);
  EXPECT_DOUBLE_EQ(parse_angle("-pi/4"), -kPi / 4.0);
  EXPECT_DOUBLE_EQ(parse_angle("pi"), kPi);
  EXPECT_DOUBLE_EQ(parse_angle("0.5pi"), kPi / 2.0);
  EXPECT_DOUBLE_EQ(parse_angle("4*pi/9"), 4.0 * kPi / 9.0);
  EXPECT_DOUBLE_EQ(parse_angle("0.6981"), 0.6981);
  EXPECT_THROW(parse_angle("pi/0"), InvalidArgument);
  EXPECT_THROW(parse_angle("2pi9"), InvalidArgument);
  EXPECT_THROW(parse_angle("tau"), InvalidArgument);
}

TEST(ScenarioJsonTest, AllKeys) {
  const auto j = json::parse(R"({
    "nt": 2, "gamma": 0.5, "theta": "pi/3", "p_t_dbm": 40, "p_dyn_dbm": 27,
    "p_sta_dbm": 30, "eta": 0.35, "bandwidth_hz": 2.0, "noise_power": [1.5, 2.5]
  })");
  const auto c = scenario_config_from_json(j);
  EXPECT_EQ(c.nt, 2);
  EXPECT_DOUBLE_EQ(c.theta, kPi / 3.0);
  const Scenario s = c.build();
  EXPECT_EQ(s.nt(), 2);
  EXPECT_NEAR(s.p_t(), 10.0, 1e-12);
  EXPECT_NEAR(s.p_dyn(), dbm_to_watts(27.0), 1e-15);
  EXPECT_NEAR(s.p_sta(), 1.0, 1e-12);
  EXPECT_EQ(s.bandwidth(), 2.0);
  EXPECT_EQ(s.noise_power(1), 2.5);
  EXPECT_NEAR(std::abs(s.channel(1)[1]), 0.5, 1e-15);
  EXPECT_NEAR(std::arg(s.channel(1)[1]), kPi / 3.0, 1e-12);
}

TEST(ScenarioJsonTest, ExplicitChannels) {
  const auto s = scenario_from_json(
      json::parse(R"({"channels": [[[1, 0], [0, 1]], [[0.5, 0.5], [0, 0]]]})"));
  EXPECT_EQ(s.nt(), 2);
  EXPECT_EQ(s.channel(0)[1], cplx(0.0, 1.0));
  EXPECT_EQ(s.channel(1)[0], cplx(0.5, 0.5));
}

TEST(ScenarioJsonTest, RejectsBadInput) {
  EXPECT_THROW(scenario_from_json(json::parse(R"({"gama": 1})")), InvalidArgument);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"nt": 1.5})")), InvalidArgument);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"noise_power": [1]})")),
               InvalidArgument);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"channels": [[[1, 0]]]})")),
               InvalidArgument);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"eta": 0})")), InvalidScenario);
  EXPECT_THROW(scenario_from_json(json::parse("[1, 2]")), InvalidArgument);
}

TEST(ResultJsonTest, RateReportFields) {
  RateReport r;
  r.per_user_rate = {1.0, 2.0};
  r.weighted_sum_rate = 3.0;
  r.energy_efficiency = 0.5;
  r.transmit_power = 4.0;
  auto j = to_json(r);
  for (const char* k : {"rate_user1", "rate_user2", "common_rate", "wsr", "ee", "power_w"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_TRUE(j["common_rate"].is_null());
  r.common_rate = 0.25;
  EXPECT_EQ(to_json(r)["common_rate"], 0.25);
}

TEST(ResultJsonTest, SolveResultCarriesOrderAndTrace) {
  SolveResult r;
  r.point.scheme = Scheme::Noma;
  r.point.order = DecodingOrder::reversed();
  r.point.precoders = PrecoderSet::zeros(2, false);
  r.trace.push_back({0, 0.1, 1.0, 2.0, "init"});
  const auto j = to_json(r);
  EXPECT_EQ(j["order"], json({2, 1}));
  EXPECT_EQ(j["trace"].size(), 1u);
  EXPECT_EQ(j["trace"][0]["status"], "init");
  EXPECT_EQ(j["point"]["private_precoders"][0].size(), 2u);
}

TEST(ResultJsonTest, OracleFields) {
  OracleResult o;
  o.best_ee = 1.5;
  o.census = 42;
  o.best_point.scheme = Scheme::Sdma;
  o.best_point.precoders = PrecoderSet::zeros(1, false);
  const auto j = to_json(o);
  for (const char* k : {"best_ee", "best_point", "census", "wall_time"})
    EXPECT_TRUE(j.contains(k)) << k;
}

TEST(CsvTest, RegionRowsFlagFailures) {
  RegionBoundary b;
  b.scheme = Scheme::Sdma;
  RegionPoint ok;
  ok.u2 = 0.1;
  ok.ee1 = 0.25;
  ok.ee2 = 0.5;
  ok.wsr = 1.0;
  ok.power_w = 2.0;
  ok.iterations = 7;
  ok.converged = true;
  ok.valid = true;
  RegionPoint bad = ok;
  bad.valid = false;
  b.points = {ok, bad};
  std::ostringstream os;
  CsvWriter w(os);
  write_region_rows(w, b, 1.0, 0.5, 27.0);
  EXPECT_EQ(os.str(),
            "sdma,1,0.5,27,0.1,0.25,0.5,1,2,7,true\n"
            "sdma,1,0.5,27,0.1,nan,nan,nan,nan,7,false\n");
}

TEST(CsvTest, TraceAndConvergenceSchemas) {
  SolveResult r;
  r.point.scheme = Scheme::Rsma;
  r.trace = {{0, 0.5, 1.0, 2.0, "init"}, {1, 0.75, 1.5, 2.5, "optimal"}};
  std::ostringstream t;
  write_trace(t, r);
  EXPECT_EQ(t.str(),
            "iteration,t,wsr,power_w,status\n0,0.5,1,2,init\n1,0.75,1.5,2.5,optimal\n");
  std::ostringstream c;
  CsvWriter w(c);
  write_convergence_rows(w, r, 40.0);
  EXPECT_EQ(c.str(), "rsma,40,0,0.5,1,2,init\nrsma,40,1,0.75,1.5,2.5,optimal\n");
}

TEST(CsvTest, LocaleIndependent) {
  const char* set = std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  EXPECT_EQ(format_double(0.5), "0.5");
  if (set) std::setlocale(LC_NUMERIC, "C");
}

}  // namespace
}  // namespace eeopt
