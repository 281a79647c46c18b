// Copyright 2026 The streamdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "streamdp/ldp.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.h"
#include "streamdp/errors.h"
#include "test_stats.h"

namespace streamdp {
namespace {

TEST(SquareWaveTest, ClosedFormAtEpsilonOne) {
  const auto p = SwParams::FromEpsilon(1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(p.half_width, 1.0 / (2 * e * (e - 2)), 1e-12);
  EXPECT_NEAR(p.half_width, 0.2561, 1e-4);
  EXPECT_NEAR(p.p, 1.1363, 1e-4);
  EXPECT_NEAR(p.q, 0.4180, 1e-4);
}

TEST(SquareWaveTest, MassIdentityAndRatio) {
  for (double eps : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const auto p = SwParams::FromEpsilon(eps);
    EXPECT_NEAR(2 * p.half_width * p.p + p.q, 1.0, 1e-12) << eps;
    EXPECT_NEAR(p.p / p.q, std::exp(eps), 1e-12 * std::exp(eps)) << eps;
  }
}

TEST(SquareWaveTest, InBandFraction) {
  for (double eps : {0.5, 2.0}) {
    const auto p = SwParams::FromEpsilon(eps);
    RandomSource rng(1, 0);
    const int n = 100000;
    int in = 0;
    for (int i = 0; i < n; ++i) {
      const double v = rng.Uniform();
      const double y = SwPerturb(v, p, rng);
      ASSERT_GE(y, -p.half_width);
      ASSERT_LE(y, 1 + p.half_width);
      in += std::fabs(y - v) <= p.half_width;
    }
    const double mass = p.InBandMass();
    EXPECT_NEAR(in / double(n), mass, 3 * std::sqrt(mass * (1 - mass) / n));
  }
}

TEST(SquareWaveTest, LargeEpsilonNarrowsTheBand) {
  // The band shrinks like (eps - 1) / (2 e^eps) and holds mass -> 1 - 1/eps.
  const auto p = SwParams::FromEpsilon(30.0);
  EXPECT_LT(p.half_width, 1e-11);
  EXPECT_NEAR(p.InBandMass(), 29.0 / 30.0, 1e-9);
  RandomSource rng(2, 0);
  int near = 0;
  for (int i = 0; i < 100000; ++i) near += std::fabs(SwPerturb(0.3, p, rng) - 0.3) < 1e-6;
  EXPECT_NEAR(near / 1e5, 29.0 / 30.0, 0.003);
}

TEST(SquareWaveTest, RejectsOutOfDomainInput) {
  const auto p = SwParams::FromEpsilon(1.0);
  RandomSource rng(1, 0);
  EXPECT_THROW(SwPerturb(1.5, p, rng), InvalidParameterError);
  EXPECT_THROW(SwPerturb(-0.1, p, rng), InvalidParameterError);
  EXPECT_THROW(SwParams::FromEpsilon(0.0), InvalidParameterError);
}

double Sum(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

TEST(SwEstimateTest, PointMassRecovered) {
  const auto p = SwParams::FromEpsilon(8.0);
  RandomSource rng(3, 0);
  std::vector<double> reports(100000);
  for (double& y : reports) y = SwPerturb(0.5, p, rng);
  const auto est = SwEstimate(reports, p, 1.0);
  ASSERT_EQ(est.frequency.size(), 1024u);
  EXPECT_NEAR(Sum(est.frequency), 1.0, 1e-9);
  double near = 0;
  for (size_t i = 509; i <= 514; ++i) near += est.frequency[i];
  EXPECT_GT(near, 0.9);
}

TEST(SwEstimateTest, UniformInputStaysFlat) {
  const auto p = SwParams::FromEpsilon(2.0);
  RandomSource rng(4, 0);
  std::vector<double> reports(100000);
  for (double& y : reports) y = SwPerturb(rng.Uniform(), p, rng);
  const auto est = SwEstimate(reports, p, 100.0);
  const double mean = 1.0 / 1024;
  for (double f : est.frequency) {
    ASSERT_GE(f, 0.0);
    EXPECT_LT(std::fabs(f - mean), 5 * mean);
  }
  EXPECT_DOUBLE_EQ(est.bin_values.front(), 0.5 * 100.0 / 1024);
  EXPECT_DOUBLE_EQ(est.bin_values.back(), 1023.5 * 100.0 / 1024);
}

TEST(SwEstimateTest, SingleReportGivesDistribution) {
  const auto p = SwParams::FromEpsilon(1.0);
  const std::vector<double> one = {0.4};
  const auto est = SwEstimate(one, p, 10.0);
  for (double f : est.frequency) EXPECT_GE(f, 0.0);
  EXPECT_NEAR(Sum(est.frequency), 1.0, 1e-9);
  EXPECT_THROW(SwEstimate(std::vector<double>{}, p, 10.0), InvalidParameterError);
}

DensityEstimate Flat(size_t n, double value) {
  DensityEstimate d;
  d.frequency.assign(n, value);
  d.bin_values.resize(n);
  for (size_t i = 0; i < n; ++i) d.bin_values[i] = static_cast<double>(i + 1);
  return d;
}

TEST(PruneTest, ZeroesFromFirstQualifyingWindow) {
  DensityEstimate d = Flat(200, 0.0);
  for (size_t i = 0; i < 100; ++i) d.frequency[i] = 0.0099;
  d.frequency[50] = 0.0005;  // a lone small bin does not qualify
  for (size_t i = 100; i < 105; ++i) d.frequency[i] = 0.0005;
  for (size_t i = 105; i < 200; ++i) d.frequency[i] = 0.0002;
  const auto out = PruneDensity(d);
  ASSERT_TRUE(out.cutoff.has_value());
  EXPECT_EQ(*out.cutoff, 100u);
  for (size_t i = 100; i < 200; ++i) EXPECT_EQ(out.frequency[i], 0.0);
  EXPECT_NEAR(Sum(out.frequency), 1.0, 1e-12);
}

TEST(PruneTest, UniformIsGuarded) {
  const DensityEstimate d = Flat(1024, 1.0 / 1024);
  const auto out = PruneDensity(d);
  EXPECT_FALSE(out.cutoff.has_value());
  EXPECT_EQ(out.frequency, d.frequency);
}

TEST(PruneTest, NoWindowLeavesUnchanged) {
  DensityEstimate d = Flat(100, 0.01);
  const auto out = PruneDensity(d);
  EXPECT_FALSE(out.cutoff.has_value());
  EXPECT_EQ(out.frequency, d.frequency);
}

TEST(HmVarianceTest, ClosedForms) {
  EXPECT_NEAR(HmWorstCaseVariance(0.5), 16.6708, 1e-4);
  const double below = HmWorstCaseVariance(0.61);
  const double above = HmWorstCaseVariance(std::nextafter(0.61, 1.0));
  const double e = std::exp(0.61), h = std::exp(0.305);
  EXPECT_NEAR(below, std::pow((e + 1) / (e - 1), 2), 1e-9);
  EXPECT_NEAR(above, (std::pow((e + 1) / (e - 1), 2) + (h + 3) / (3 * (h - 1))) / h,
              1e-9);
  // The two branches do not meet at the cutoff; record the gap.
  RecordProperty("hm_cutoff_gap", std::to_string(above - below));
  EXPECT_NE(above, below);
  EXPECT_LT(HmWorstCaseVariance(50.0), 1e-9);
  for (double eps : {0.3, 0.61, 0.62, 1.0, 2.0, 5.0}) {
    EXPECT_NEAR(HmWorstCaseVariance(eps),
                static_cast<double>(oracle::HmVariance50(eps)), 1e-12);
  }
}

TEST(LdpThresholdTest, TwoPointExampleMatchesOracle) {
  DensityEstimate d;
  for (int v = 1; v <= 10; ++v) {
    d.bin_values.push_back(v);
    d.frequency.push_back(v == 1 ? 0.9 : v == 10 ? 0.1 : 0.0);
  }
  const auto decision = LdpThreshold(d, 1.0, 100);
  const size_t best =
      oracle::LdpArgmin50(d.bin_values, d.frequency, d.bin_values, 1.0, 100);
  EXPECT_EQ(decision.theta, d.bin_values[best]);
  EXPECT_EQ(decision.theta, 1.0);
  for (size_t i = 0; i < d.bin_values.size(); ++i) {
    EXPECT_NEAR(decision.trace[i],
                static_cast<double>(oracle::LdpError50(d.bin_values, d.frequency,
                                                       d.bin_values[i], 1.0, 100)),
                1e-9 * decision.trace[i]);
  }
}

TEST(LdpThresholdTest, NoNoiseChoosesSmallestZeroTail) {
  DensityEstimate d;
  for (int v = 1; v <= 20; ++v) {
    d.bin_values.push_back(v);
    d.frequency.push_back(v <= 7 ? 1.0 / 7 : 0.0);
  }
  EXPECT_EQ(LdpThreshold(d, 60.0, 1000).theta, 7.0);
}

TEST(LdpThresholdTest, PointMass) {
  DensityEstimate d = Flat(30, 0.0);
  d.frequency[11] = 1.0;
  EXPECT_EQ(LdpThreshold(d, 1.0, 1 << 16).theta, 12.0);
  EXPECT_THROW(LdpThreshold(Flat(10, 0.0), 1.0, 100), InvalidParameterError);
}

struct Draws {
  testing::Moments moments;
  double positive_fraction;
};

template <typename F>
Draws Sample(F&& draw, int n, uint64_t seed) {
  RandomSource rng(seed, 0);
  std::vector<double> xs(n);
  int pos = 0;
  for (double& x : xs) {
    x = draw(rng);
    pos += x > 0;
  }
  return {testing::ComputeMoments(xs), pos / double(n)};
}

double SrVariance(double v, double eps) { return std::pow(SrBound(eps), 2) - v * v; }

double PmVariance(double v, double eps) {
  const double h = std::exp(eps / 2);
  return v * v / (h - 1) + (h + 3) / (3 * (h - 1) * (h - 1));
}

TEST(SrTest, Examples) {
  const double eps = std::log(3.0);
  EXPECT_NEAR(SrBound(eps), 2.0, 1e-12);
  const auto one = Sample([&](RandomSource& r) { return SrPerturb(1.0, eps, r); }, 100000, 1);
  EXPECT_NEAR(one.moments.mean, 1.0, 3 * one.moments.StdErr());
  const auto zero = Sample([&](RandomSource& r) { return SrPerturb(0.0, eps, r); }, 1000000, 2);
  EXPECT_NEAR(zero.moments.variance, 4.0, 0.03 * 4.0);
  RandomSource rng(3, 0);
  EXPECT_NEAR(SrPerturb(-1.0, 60.0, rng), -1.0, 1e-12);
  EXPECT_THROW(SrPerturb(1.1, 1.0, rng), InvalidParameterError);
}

TEST(SrTest, LikelihoodRatioBoundedByExpEpsilon) {
  const double eps = 1.0;
  const auto hi = Sample([&](RandomSource& r) { return SrPerturb(1.0, eps, r); }, 1000000, 4);
  const auto lo = Sample([&](RandomSource& r) { return SrPerturb(-1.0, eps, r); }, 1000000, 5);
  const double e = std::exp(eps);
  EXPECT_NEAR(hi.positive_fraction, e / (e + 1), 0.002);
  EXPECT_NEAR(lo.positive_fraction, 1 / (e + 1), 0.002);
  EXPECT_NEAR(hi.positive_fraction / lo.positive_fraction, e, 0.02 * e);
}

TEST(PmTest, ClosedFormAtTwoLnThree) {
  const auto pm = PmParams::FromEpsilon(2 * std::log(3.0));
  EXPECT_NEAR(pm.bound, 2.0, 1e-12);
  EXPECT_NEAR(pm.p, 0.75, 1e-12);
  EXPECT_NEAR(pm.q, 1.0 / 12, 1e-12);
  const double width = pm.Right(0) - pm.Left(0);
  EXPECT_NEAR(pm.p * width, 0.75, 1e-12);
  EXPECT_NEAR(pm.q * (2 * pm.bound - width), 0.25, 1e-12);
}

TEST(PmTest, MeanAndVariance) {
  const double eps = 2.0;
  const auto d = Sample([&](RandomSource& r) { return PmPerturb(0.3, eps, r); }, 1000000, 6);
  EXPECT_NEAR(d.moments.mean, 0.3, 3 * d.moments.StdErr());
  EXPECT_NEAR(d.moments.variance, PmVariance(0.3, eps), 0.03 * PmVariance(0.3, eps));
}

TEST(HmTest, SmallEpsilonAlwaysSr) {
  RandomSource rng(7, 0);
  for (int i = 0; i < 10000; ++i) ASSERT_FALSE(HmPerturb(0.2, 0.5, rng).piecewise);
  const auto d = Sample([](RandomSource& r) { return HmPerturb(0.0, 0.5, r).value; }, 1000000, 8);
  EXPECT_NEAR(d.moments.variance, 16.67, 0.03 * 16.67);
}

TEST(HmTest, PiecewiseFraction) {
  RandomSource rng(9, 0);
  const int n = 100000;
  int pm = 0;
  for (int i = 0; i < n; ++i) pm += HmPerturb(0.5, 2.0, rng).piecewise;
  const double a = 1 - std::exp(-1.0);
  EXPECT_NEAR(a, 0.6321, 1e-4);
  EXPECT_NEAR(pm / double(n), a, 3 * std::sqrt(a * (1 - a) / n));
}

TEST(HmTest, UnbiasedAcrossGrid) {
  uint64_t seed = 100;
  for (double eps : {0.5, 1.0, 2.0}) {
    for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const auto d = Sample([&](RandomSource& r) { return HmPerturb(v, eps, r).value; },
                            200000, seed++);
      EXPECT_NEAR(d.moments.mean, v, 4 * d.moments.StdErr()) << eps << " " << v;
    }
  }
}

TEST(EncodeTest, AffineRoundTrip) {
  EXPECT_DOUBLE_EQ(EncodeUnit(0, 8), -1);
  EXPECT_DOUBLE_EQ(EncodeUnit(8, 8), 1);
  EXPECT_DOUBLE_EQ(EncodeUnit(2, 8), -0.5);
  EXPECT_DOUBLE_EQ(DecodeUnit(EncodeUnit(3.7, 8), 8), 3.7);
}

}  // namespace
}  // namespace streamdp
