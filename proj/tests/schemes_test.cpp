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
#include "eeopt/schemes.hpp"

namespace eeopt {
namespace {

const PowerModel kModel{10.0, 0.35, 10.0, 1.0};  // P_cir = 41 W at nt = 4

PrecoderSet privates(CVector p1, CVector p2) {
  PrecoderSet p;
  p.priv = {std::move(p1), std::move(p2)};
  return p;
}

CVector random_vector(std::mt19937_64& rng, int nt, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(nt);
  for (int i = 0; i < nt; ++i) v[i] = cplx(n(rng), n(rng)) * scale;
  return v;
}

/// Random precoders scaled into the power budget.
PrecoderSet random_precoders(std::mt19937_64& rng, int nt, double p_t,
                             bool with_common) {
  PrecoderSet p;
  if (with_common) p.common = random_vector(rng, nt, 1.0);
  p.priv = {random_vector(rng, nt, 1.0), random_vector(rng, nt, 1.0)};
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const double scale = std::sqrt(frac(rng) * p_t / p.transmit_power());
  if (p.common) *p.common *= scale;
  for (auto& v : p.priv) v *= scale;
  return p;
}

TEST(SdmaRatesTest, SingleUserMatchedFilter) {
  auto s = make_scenario(1.0, 0.0, 4, kModel);
  const CVector h1 = s.channel(0);
  auto r = sdma_rates(privates(std::sqrt(10.0) * h1 / h1.norm(),
                               CVector::Zero(4)),
                      s);
  EXPECT_NEAR(r[0], std::log2(41.0), 1e-12);
  EXPECT_NEAR(r[0], 5.3576, 1e-4);
  EXPECT_EQ(r[1], 0.0);
}

TEST(SdmaRatesTest, ZeroPrecoders) {
  auto s = make_scenario(1.0, 0.0, 4, kModel);
  auto r = sdma_rates(PrecoderSet::zeros(4, false), s);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 0.0);
}

TEST(SdmaRatesTest, OrthogonalChannelsDecouple) {
  auto s = make_scenario(1.0, kPi / 2.0, 4, kModel);
  const CVector h1 = s.channel(0), h2 = s.channel(1);
  auto r = sdma_rates(privates(std::sqrt(5.0) * h1 / h1.norm(),
                               std::sqrt(5.0) * h2 / h2.norm()),
                      s);
  EXPECT_NEAR(r[0], std::log2(21.0), 1e-12);
  EXPECT_NEAR(r[1], std::log2(21.0), 1e-12);
  EXPECT_NEAR(r[0], 4.392, 1e-3);
}

TEST(SdmaRatesTest, RejectsActiveCommon) {
  auto s = make_scenario(1.0, 0.0, 4, kModel);
  auto p = PrecoderSet::zeros(4, true);
  p.common->setOnes();
  EXPECT_THROW(sdma_rates(p, s), InvalidArgument);
  EXPECT_THROW(sdma_rates(PrecoderSet::zeros(3, false), s), InvalidArgument);
}

TEST(NomaRatesTest, AlignedChannelsHandComputed) {
  auto s = make_scenario(0.3, 0.0, 4, kModel);
  const CVector h1 = s.channel(0);
  auto p = privates(std::sqrt(8.0) * h1 / 2.0, std::sqrt(2.0) * h1 / 2.0);
  auto r = noma_rates(p, DecodingOrder::natural(), s);
  // gamma_1 = 32/9, gamma_{2->1} = 2.88/1.72, gamma_2 = 0.72.
  const double expected1 =
      std::min(std::log2(1.0 + 32.0 / 9.0), std::log2(1.0 + 2.88 / 1.72));
  EXPECT_NEAR(r[0], expected1, 1e-12);
  EXPECT_NEAR(r[0], std::log2(2.6744), 1e-4);
  EXPECT_NEAR(r[0], 1.4193, 1e-4);
  EXPECT_NEAR(r[1], std::log2(1.72), 1e-12);
  EXPECT_NEAR(r[1], 0.7824, 1e-4);
}

TEST(NomaRatesTest, ZeroPrecoders) {
  auto s = make_scenario(0.3, 0.0, 4, kModel);
  for (auto order : {DecodingOrder::natural(), DecodingOrder::reversed()}) {
    auto r = noma_rates(PrecoderSet::zeros(4, false), order, s);
    EXPECT_EQ(r[0], 0.0);
    EXPECT_EQ(r[1], 0.0);
  }
}

TEST(NomaRatesTest, SymmetricChannelsMirrorOrders) {
  auto s = make_scenario(1.0, 0.0, 4, kModel);
  const CVector h = s.channel(0);
  auto p = privates(std::sqrt(3.0) * h / h.norm(), std::sqrt(3.0) * h / h.norm());
  auto a = noma_rates(p, DecodingOrder::natural(), s);
  auto b = noma_rates(p, DecodingOrder::reversed(), s);
  EXPECT_NEAR(a[0], b[1], 1e-12);
  EXPECT_NEAR(a[1], b[0], 1e-12);
}

TEST(NomaRatesTest, RejectsBadOrder) {
  auto s = make_scenario(1.0, 0.0, 2, kModel);
  EXPECT_THROW(noma_rates(PrecoderSet::zeros(2, false), DecodingOrder{0, 0}, s),
               InvalidArgument);
}

TEST(RsmaRatesTest, NoCommonStreamReducesToSdma) {
  std::mt19937_64 rng(11);
  auto s = make_scenario(0.7, 1.1, 4, kModel);
  for (int i = 0; i < 20; ++i) {
    auto p = random_precoders(rng, 4, 10.0, false);
    auto sd = sdma_rates(p, s);
    p.common = CVector::Zero(4);
    auto rs = rsma_rates(p, {}, s);
    EXPECT_EQ(rs.private_rate[0], sd[0]);
    EXPECT_EQ(rs.private_rate[1], sd[1]);
    EXPECT_EQ(rs.common_rate, 0.0);
  }
}

TEST(RsmaRatesTest, CommonRateIsWeakestUser) {
  auto s = make_scenario(0.3, 0.0, 4, kModel);
  const CVector h1 = s.channel(0);
  auto p = PrecoderSet::zeros(4, true);
  *p.common = std::sqrt(10.0) * h1 / h1.norm();
  auto r = rsma_rates(p, {}, s);
  EXPECT_NEAR(r.common_rate_at_user[0], std::log2(41.0), 1e-12);
  EXPECT_NEAR(r.common_rate, std::log2(4.6), 1e-12);
  EXPECT_NEAR(r.common_rate, 2.2016, 1e-4);
  EXPECT_THROW(rsma_rates(p, {{2.3, 0.0}}, s), SplitExceedsCommonRate);
  EXPECT_NO_THROW(rsma_rates(p, {{r.common_rate, 0.0}}, s));
  EXPECT_NO_THROW(rsma_rates(p, {{1.0, r.common_rate - 1.0}}, s));
  EXPECT_THROW(rsma_rates(p, {{-0.1, 0.0}}, s), InvalidArgument);
}

TEST(RsmaRatesTest, SplitAcceptanceBoundary) {
  std::mt19937_64 rng(5);
  auto s = make_scenario(0.8, 0.4, 3, kModel);
  std::uniform_real_distribution<double> f(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    auto p = random_precoders(rng, 3, 10.0, true);
    const double rc = rsma_rates(p, {}, s).common_rate;
    const double a = f(rng);
    EXPECT_NO_THROW(rsma_rates(p, {{a * rc, (1.0 - a) * rc}}, s));
    EXPECT_THROW(rsma_rates(p, {{a * rc + 1e-6, (1.0 - a) * rc}}, s),
                 SplitExceedsCommonRate);
  }
}

TEST(EvaluateTest, ZeroPrecodersGiveZeroEe) {
  auto s = make_scenario(1.0, 0.3, 4, kModel);
  for (auto scheme : {Scheme::Sdma, Scheme::Noma, Scheme::Rsma}) {
    SchemePoint pt;
    pt.scheme = scheme;
    pt.precoders = PrecoderSet::zeros(4, scheme == Scheme::Rsma);
    EXPECT_EQ(evaluate_ee(pt, {1.0, 2.0}, s), 0.0);
    auto ind = individual_ee(pt, s);
    EXPECT_EQ(ind[0], 0.0);
    EXPECT_EQ(ind[1], 0.0);
  }
}

TEST(EvaluateTest, SingleUserSdma) {
  auto s = make_scenario(1.0, 0.0, 4, kModel);
  SchemePoint pt;
  pt.scheme = Scheme::Sdma;
  pt.precoders = privates(std::sqrt(10.0) * s.channel(0) / 2.0, CVector::Zero(4));
  const double expected = std::log2(41.0) / (10.0 / 0.35 + 41.0);
  EXPECT_NEAR(evaluate_ee(pt, {1.0, 1.0}, s), expected, 1e-12);
  EXPECT_NEAR(evaluate_ee(pt, {1.0, 1.0}, s), 0.0770, 1e-4);
  auto ind = individual_ee(pt, s);
  EXPECT_NEAR(ind[0], expected, 1e-12);
  EXPECT_EQ(ind[1], 0.0);
}

TEST(EvaluateTest, RejectsPowerViolation) {
  auto s = make_scenario(1.0, 0.0, 4, kModel);
  SchemePoint pt;
  pt.scheme = Scheme::Sdma;
  pt.precoders = privates(CVector::Constant(4, std::sqrt(1.01 * 10.0 / 4.0)),
                          CVector::Zero(4));
  EXPECT_THROW(evaluate(pt, {1.0, 1.0}, s), PowerBudgetViolation);
}

TEST(EvaluateTest, IndividualEeAddsUpToUnweightedEe) {
  std::mt19937_64 rng(17);
  auto s = make_scenario(0.6, 0.9, 4, kModel);
  for (int i = 0; i < 50; ++i) {
    SchemePoint pt;
    pt.scheme = Scheme::Rsma;
    pt.precoders = random_precoders(rng, 4, 10.0, true);
    const double rc = rsma_rates(pt.precoders, {}, s).common_rate;
    pt.split = {{0.25 * rc, 0.5 * rc}};
    auto ind = individual_ee(pt, s);
    EXPECT_NEAR(ind[0] + ind[1], evaluate_ee(pt, {1.0, 1.0}, s), 1e-12);
  }
}

TEST(EvaluateTest, WeightedSumRate) {
  std::mt19937_64 rng(19);
  auto s = make_scenario(0.6, 0.9, 2, kModel);
  auto p = random_precoders(rng, 2, 10.0, false);
  SchemePoint pt;
  pt.scheme = Scheme::Sdma;
  pt.precoders = p;
  auto rates = sdma_rates(p, s);
  auto rep = evaluate(pt, {2.0, 0.5}, s);
  EXPECT_NEAR(rep.weighted_sum_rate, 2.0 * rates[0] + 0.5 * rates[1], 1e-12);
  EXPECT_NEAR(rep.energy_efficiency,
              rep.weighted_sum_rate / total_power(p.transmit_power(), s), 1e-12);
}

// Embedding SDMA/NOMA points into RSMA leaves the EE unchanged.
TEST(EmbeddingTest, SdmaAndNomaEmbedExactly) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> g(0.1, 1.5), th(0.0, kPi);
  for (int i = 0; i < 100; ++i) {
    const int nt = 1 + i % 4;
    auto s = make_scenario(g(rng), th(rng), nt, kModel);
    const WeightVector u{1.0, g(rng)};

    SchemePoint sd;
    sd.scheme = Scheme::Sdma;
    sd.precoders = random_precoders(rng, nt, 10.0, false);
    const double e_sd = evaluate_ee(sd, u, s);
    EXPECT_NEAR(evaluate_ee(embed_sdma_in_rsma(sd), u, s), e_sd,
                1e-9 * std::max(1.0, e_sd));

    SchemePoint no;
    no.scheme = Scheme::Noma;
    no.order = i % 2 ? DecodingOrder::reversed() : DecodingOrder::natural();
    no.precoders = random_precoders(rng, nt, 10.0, false);
    const double e_no = evaluate_ee(no, u, s);
    const SchemePoint em = embed_noma_in_rsma(no, s);
    EXPECT_NEAR(evaluate_ee(em, u, s), e_no, 1e-9 * std::max(1.0, e_no));
    EXPECT_NEAR(em.precoders.transmit_power(), no.precoders.transmit_power(),
                1e-12);
  }
}

TEST(PropertyTest, PhaseInvariance) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  auto s = make_scenario(0.8, 0.7, 4, kModel);
  for (int i = 0; i < 50; ++i) {
    SchemePoint pt;
    pt.scheme = Scheme::Rsma;
    pt.precoders = random_precoders(rng, 4, 10.0, true);
    const double rc = rsma_rates(pt.precoders, {}, s).common_rate;
    pt.split = {{0.3 * rc, 0.6 * rc}};
    const double base = evaluate_ee(pt, {1.0, 0.7}, s);
    SchemePoint rot = pt;
    const int which = i % 3;
    const cplx phase = std::polar(1.0, ph(rng));
    if (which == 0) *rot.precoders.common *= phase;
    else rot.precoders.priv[which - 1] *= phase;
    EXPECT_NEAR(evaluate_ee(rot, {1.0, 0.7}, s), base, 1e-12);
  }
}

TEST(PropertyTest, RateMonotoneInOwnGain) {
  std::mt19937_64 rng(31);
  auto s = make_scenario(0.5, 0.3, 4, kModel);
  for (int i = 0; i < 50; ++i) {
    auto p = random_precoders(rng, 4, 5.0, false);
    auto before = sdma_rates(p, s);
    // Growing p_1 along itself raises |h_1^H p_1|^2 and leaves user 1's
    // interference term |h_1^H p_2|^2 fixed.
    p.priv[0] *= 1.3;
    auto after = sdma_rates(p, s);
    EXPECT_GE(after[0], before[0]);
  }
}

TEST(PropertyTest, BandwidthScalesRates) {
  std::mt19937_64 rng(37);
  auto pm = kModel;
  auto [h1, h2] = make_channels(0.8, 0.5, 3);
  Scenario narrow({h1, h2}, pm, {2.0, 2.0}, 2.0);
  Scenario unit({h1, h2}, pm, {2.0, 2.0}, 1.0);
  auto p = random_precoders(rng, 3, 10.0, false);
  auto a = sdma_rates(p, narrow);
  auto b = sdma_rates(p, unit);
  EXPECT_NEAR(a[0], 2.0 * b[0], 1e-12);
  EXPECT_NEAR(a[1], 2.0 * b[1], 1e-12);
}

TEST(SchemeNameTest, RoundTrip) {
  for (auto s : {Scheme::Rsma, Scheme::Sdma, Scheme::Noma})
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_THROW(parse_scheme("ofdma"), InvalidArgument);
}

}  // namespace
}  // namespace eeopt
