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

#include "streamdp/smoother.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.h"
#include "streamdp/errors.h"
#include "streamdp/random.h"

namespace streamdp {
namespace {

TEST(OptimizeSTest, WorkedCase) {
  EXPECT_EQ(OptimizeSmoothedLevels(100, 0.01, 1 << 20, 16), 4);
  EXPECT_NEAR(SmoothingErrorModel(0, 100, 0.01, 1 << 20, 16), 3.75e11, 0.01e11);
  EXPECT_NEAR(SmoothingErrorModel(3, 100, 0.01, 1 << 20, 16), 2.4e10, 0.05e10);
  EXPECT_NEAR(SmoothingErrorModel(4, 100, 0.01, 1 << 20, 16), 3.08e9, 0.01e9);
}

TEST(OptimizeSTest, MatchesExactOracleOnGrid) {
  const auto grid = oracle::SmoothingGrid();
  ASSERT_EQ(grid.size(), 200u);
  for (const auto& c : grid) {
    const uint64_t r = static_cast<uint64_t>(std::llround(std::pow(c.b, c.k)));
    const double eps = static_cast<double>(c.eps_num) / c.eps_den;
    EXPECT_EQ(OptimizeSmoothedLevels(static_cast<double>(c.theta_num), eps, r, c.b),
              oracle::ExactOptimizeS(c))
        << "b=" << c.b << " k=" << c.k << " theta=" << c.theta_num
        << " eps=" << eps;
  }
}

TEST(OptimizeSTest, Limits) {
  EXPECT_EQ(OptimizeSmoothedLevels(100, 1e9, 1 << 20, 16), 0);
  for (double theta : {1e-6, 1.0, 1e6}) {
    EXPECT_EQ(OptimizeSmoothedLevels(theta, 0.01, 1 << 20, 16), 4);
  }
  EXPECT_THROW(OptimizeSmoothedLevels(0, 1, 16, 2), InvalidParameterError);
}

Smoother Make(SmootherKind kind, uint64_t group, double theta, int w = 4,
              double alpha = 0.5) {
  return Smoother(SmootherOptions{kind, w, alpha}, group, theta);
}

TEST(SmootherTest, RecentDividesByGroupSize) {
  Smoother s = Make(SmootherKind::kRecent, 4, 10);
  EXPECT_DOUBLE_EQ(s.prior(), 20.0);
  EXPECT_DOUBLE_EQ(s.Next(std::nullopt), 5.0);  // u_0 / 4
  EXPECT_DOUBLE_EQ(s.Next(8.0), 2.0);
  EXPECT_DOUBLE_EQ(s.Next(std::nullopt), 2.0);
}

TEST(SmootherTest, ExponentialRecursion) {
  Smoother s = Make(SmootherKind::kExponential, 1, 4, 4, 0.5);
  EXPECT_DOUBLE_EQ(s.Next(std::nullopt), 2.0);
  EXPECT_DOUBLE_EQ(s.Next(6.0), 4.0);
}

TEST(SmootherTest, MovingAverageWindow) {
  Smoother s = Make(SmootherKind::kMovingAverage, 1, 4, 2);
  s.Next(std::nullopt);
  s.Next(4.0);
  EXPECT_DOUBLE_EQ(s.Next(8.0), 6.0);
}

TEST(SmootherTest, MovingAverageShortHistoryFallback) {
  Smoother s = Make(SmootherKind::kMovingAverage, 1, 4, 4);
  // t = 1 < w - 1: average of u_0, u_1.
  EXPECT_DOUBLE_EQ(s.Next(6.0), (2.0 + 6.0) / 2);
  // t = 3 = w - 1: window u_0..u_3.
  s.Next(4.0);
  EXPECT_DOUBLE_EQ(s.Next(8.0), (2.0 + 6 + 4 + 8) / 4);
}

TEST(SmootherTest, MeanUsesPrintedDivisor) {
  Smoother s = Make(SmootherKind::kMean, 2, 4);  // u_0 = 4
  EXPECT_DOUBLE_EQ(s.Next(std::nullopt), 2.0);   // t = 0 falls back to u_0 / b^s
  EXPECT_DOUBLE_EQ(s.Next(6.0), (4.0 + 6) / (2 * 1));
  EXPECT_DOUBLE_EQ(s.Next(2.0), (4.0 + 6 + 2) / (2 * 2));
}

TEST(SmootherTest, MedianScaledByGroup) {
  Smoother s = Make(SmootherKind::kMedian, 2, 4);
  EXPECT_DOUBLE_EQ(s.Next(10.0), 5.0);
  EXPECT_DOUBLE_EQ(s.Next(2.0), 3.0);
  EXPECT_DOUBLE_EQ(s.Next(4.0), 2.0);
  s.Next(100.0);
  EXPECT_DOUBLE_EQ(s.Next(std::nullopt), (4.0 + 10) / 2 / 2);
}

TEST(SmootherTest, StreamingMedianMatchesSort) {
  Smoother s = Make(SmootherKind::kMedian, 1, 1);
  RandomSource rng(1, 0);
  std::vector<double> seen;
  for (int i = 0; i < 300; ++i) {
    const double u = rng.Uniform(-50, 50);
    seen.push_back(u);
    std::vector<double> sorted = seen;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    const double median =
        n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    ASSERT_DOUBLE_EQ(s.Next(u), median);
  }
}

TEST(SmootherTest, ExponentialLimits) {
  Smoother one = Make(SmootherKind::kExponential, 4, 8, 4, 1.0);
  Smoother recent = Make(SmootherKind::kRecent, 4, 8);
  Smoother zero = Make(SmootherKind::kExponential, 4, 8, 4, 0.0);
  RandomSource rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    std::optional<double> u;
    if (i % 4 == 0) u = rng.Uniform(0, 32);
    EXPECT_DOUBLE_EQ(one.Next(u), recent.Next(u));
    EXPECT_DOUBLE_EQ(zero.Next(u), 4.0);
  }
}

TEST(SmootherTest, ConvexRulesStayInsideWindowRange) {
  RandomSource rng(3, 0);
  for (auto kind : {SmootherKind::kMean, SmootherKind::kMovingAverage}) {
    Smoother s = Make(kind, 2, 10, 3);
    std::vector<double> all = {s.prior()};
    for (int i = 0; i < 40; ++i) {
      const double u = rng.Uniform(0, 20);
      all.push_back(u);
      const double v = s.Next(u);
      if (kind == SmootherKind::kMovingAverage) {
        const size_t lo = all.size() >= 3 ? all.size() - 3 : 0;
        const auto [mn, mx] = std::minmax_element(all.begin() + lo, all.end());
        EXPECT_GE(v, *mn / 2 - 1e-12);
        EXPECT_LE(v, *mx / 2 + 1e-12);
      } else {
        // The printed mean divides t + 1 terms by t; rescaled it is convex.
        const double t = static_cast<double>(all.size() - 1);
        const auto [mn, mx] = std::minmax_element(all.begin(), all.end());
        EXPECT_GE(v * t / (t + 1), *mn / 2 - 1e-12);
        EXPECT_LE(v * t / (t + 1), *mx / 2 + 1e-12);
      }
    }
  }
}

TEST(SmootherTest, RecentWithUnitGroupIsIdentity) {
  Smoother s = Make(SmootherKind::kRecent, 1, 5);
  for (double u : {3.0, -2.0, 7.5}) EXPECT_DOUBLE_EQ(s.Next(u), u);
}

TEST(SmootherTest, RejectsBadOptions) {
  EXPECT_THROW(Make(SmootherKind::kMovingAverage, 1, 1, 0), InvalidParameterError);
  EXPECT_THROW(Make(SmootherKind::kExponential, 1, 1, 4, 1.5), InvalidParameterError);
  EXPECT_THROW(SmootherKindFromString("bogus"), ConfigError);
  EXPECT_EQ(SmootherKindFromString("moving_average"), SmootherKind::kMovingAverage);
}

}  // namespace
}  // namespace streamdp
