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

#include "streamdp/harness.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "streamdp/errors.h"

namespace streamdp {
namespace {

std::vector<double> Parse(const std::string& text, LoadOptions o = {}) {
  std::istringstream in(text);
  return ParseStream(in, o);
}

std::string ErrorOf(const std::string& text, LoadOptions o = {}) {
  try {
    Parse(text, o);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(LoadTest, SingleValue) {
  EXPECT_EQ(Parse("7\n"), std::vector<double>{7.0});
}

TEST(LoadTest, SkipsBlankLinesAndHeader) {
  LoadOptions o;
  o.header = true;
  EXPECT_EQ(Parse("value\n1\n\n2.5\r\n", o), (std::vector<double>{1.0, 2.5}));
}

TEST(LoadTest, CsvColumn) {
  LoadOptions o;
  o.column = 1;
  EXPECT_EQ(Parse("a,3,x\nb,4,y\n", o), (std::vector<double>{3.0, 4.0}));
  EXPECT_NE(ErrorOf("a,3\nb\n", o).find("line 2"), std::string::npos);
}

TEST(LoadTest, ErrorsNameTheLine) {
  EXPECT_NE(ErrorOf("1\n2\nabc\n").find("line 3"), std::string::npos);
  EXPECT_NE(ErrorOf("1\n-4\n").find("line 2"), std::string::npos);
  EXPECT_NE(ErrorOf("1\nnan\n").find("line 2"), std::string::npos);
  EXPECT_FALSE(ErrorOf("").empty());
  EXPECT_FALSE(ErrorOf("\n\n").empty());
}

TEST(LoadTest, MissingFile) {
  EXPECT_THROW(LoadStream("/nonexistent/stream.txt", {}), DataError);
}

TEST(ProfileTest, NearestRank) {
  std::vector<double> v;
  for (int i = 1; i <= 200; ++i) v.push_back(201 - i);
  const auto p = ProfileStream(v);
  EXPECT_EQ(p.n, 200u);
  EXPECT_EQ(p.max, 200.0);
  EXPECT_EQ(p.p85, 170.0);   // ceil(0.85 * 200)
  EXPECT_EQ(p.p95, 190.0);
  EXPECT_EQ(p.p995, 199.0);
  EXPECT_DOUBLE_EQ(p.mean, 100.5);
  EXPECT_THROW(ProfileStream(std::vector<double>{}), DataError);
}

TEST(SyntheticTest, ParseAndPrint) {
  EXPECT_EQ(SyntheticSpec::Parse("constant(5)").ToString(), "constant(5)");
  EXPECT_EQ(SyntheticSpec::Parse(" uniform( 0 , 100 )").ToString(), "uniform(0,100)");
  EXPECT_EQ(SyntheticSpec::Parse("heavy_tail(0.995,100,2000)").ToString(),
            "heavy_tail(0.995,100,2000)");
  for (const char* bad : {"constant", "constant(-1)", "uniform(5,1)",
                          "heavy_tail(2,100,2000)", "heavy_tail(0.9,100,50)",
                          "zipf(1)", "constant(x)"}) {
    EXPECT_THROW(SyntheticSpec::Parse(bad), ConfigError) << bad;
  }
}

TEST(SyntheticTest, Deterministic) {
  const auto spec = SyntheticSpec::Parse("uniform(0,10)");
  EXPECT_EQ(GenSynthetic(spec, 100, 3), GenSynthetic(spec, 100, 3));
  EXPECT_NE(GenSynthetic(spec, 100, 3), GenSynthetic(spec, 100, 4));
  for (double v : GenSynthetic(spec, 1000, 5)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 10.0);
  }
}

TEST(SyntheticTest, HeavyTailShape) {
  const auto v = GenSynthetic(SyntheticSpec::Parse("heavy_tail(0.995,100,2000)"),
                              200000, 1);
  const size_t tail = std::count_if(v.begin(), v.end(), [](double x) { return x > 100; });
  const double frac = tail / 200000.0;
  EXPECT_NEAR(frac, 0.005, 4 * std::sqrt(0.005 * 0.995 / 200000));
  const auto p = ProfileStream(v);
  EXPECT_NEAR(p.p95, 100.0 * 0.95 / 0.995, 0.5);
  EXPECT_LE(p.max, 2000.0);
  EXPECT_GT(p.max, 1900.0);
}

TEST(QueryTest, RespectsBounds) {
  for (auto mode : {QueryMode::kUniformLength, QueryMode::kUniformEndpoints}) {
    const auto w = GenQueries(1000, 64, 5000, 11, mode);
    ASSERT_EQ(w.queries.size(), 5000u);
    for (const auto& q : w.queries) {
      ASSERT_GE(q.first, 1u);
      ASSERT_LE(q.first, q.last);
      ASSERT_LE(q.last, 1000u);
      ASSERT_LE(q.last - q.first + 1, 64u);
    }
  }
}

TEST(QueryTest, LengthIsUniform) {
  const auto w = GenQueries(1000, 4, 40000, 12);
  std::vector<int> counts(5, 0);
  for (const auto& q : w.queries) ++counts[q.last - q.first + 1];
  for (int len = 1; len <= 4; ++len) EXPECT_NEAR(counts[len] / 40000.0, 0.25, 0.01);
}

TEST(QueryTest, DegenerateSizes) {
  for (const auto& q : GenQueries(1, 100, 20, 1).queries) {
    EXPECT_EQ(q.first, 1u);
    EXPECT_EQ(q.last, 1u);
  }
  for (const auto& q : GenQueries(50, 1, 20, 1).queries) EXPECT_EQ(q.first, q.last);
  EXPECT_THROW(GenQueries(0, 1, 1, 1), InvalidParameterError);
  EXPECT_THROW(GenQueries(10, 0, 1, 1), InvalidParameterError);
  EXPECT_THROW(QueryModeFromString("random"), ConfigError);
}

TEST(QueryTest, Deterministic) {
  const auto a = GenQueries(500, 50, 100, 9);
  const auto b = GenQueries(500, 50, 100, 9);
  for (size_t i = 0; i < a.queries.size(); ++i) {
    EXPECT_EQ(a.queries[i].first, b.queries[i].first);
    EXPECT_EQ(a.queries[i].last, b.queries[i].last);
  }
}

TEST(EvaluateTest, IdentityIsZero) {
  const auto v = GenSynthetic(SyntheticSpec::Parse("uniform(0,5)"), 300, 2);
  EXPECT_EQ(Evaluate(v, v, GenQueries(300, 30, 100, 1)).mse, 0.0);
}

TEST(EvaluateTest, ConstantOffset) {
  const std::vector<double> truth(100, 1.0);
  const std::vector<double> shifted(100, 1.5);
  const auto w = GenQueries(100, 10, 500, 3);
  const auto report = Evaluate(truth, shifted, w);
  double expected = 0;
  for (const auto& q : w.queries) {
    const double k = static_cast<double>(q.last - q.first + 1);
    expected += (0.5 * k) * (0.5 * k);
  }
  EXPECT_NEAR(report.mse, expected / 500, 1e-9);
}

TEST(EvaluateTest, BaseHasClosedForm) {
  // Publishing zeros on a constant stream of c: error is (c * length)^2,
  // with length uniform on 1..r: c^2 (r + 1)(2r + 1) / 6.
  const double c = 3.0;
  const uint64_t r = 20;
  const std::vector<double> truth(1000, c), zeros(1000, 0.0);
  const auto report = Evaluate(truth, zeros, GenQueries(1000, r, 200000, 4));
  const double expected = c * c * (r + 1) * (2 * r + 1) / 6.0;
  EXPECT_NEAR(report.mse, expected, 0.01 * expected);
}

TEST(EvaluateTest, RejectsMisalignment) {
  const std::vector<double> a(10, 1.0), b(9, 1.0);
  EXPECT_THROW(Evaluate(a, b, GenQueries(9, 3, 5, 1)), DataError);
  EXPECT_THROW(Evaluate(b, b, GenQueries(10, 3, 50, 1)), DataError);
}

TEST(SummarizeTest, SampleStd) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = Summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.stddev, std::sqrt(32.0 / 7), 1e-12);
  EXPECT_EQ(Summarize(std::vector<double>{3}).stddev, 0.0);
}

}  // namespace
}  // namespace streamdp
