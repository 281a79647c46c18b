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

#include "streamdp/experiment.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "streamdp/errors.h"

namespace streamdp {
namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.synthetic = SyntheticSpec::Parse("heavy_tail(0.99,20,200)");
  c.n = 3000;
  c.data_seed = 1;
  c.stream.upper_bound = 200;
  c.stream.range_limit = 256;
  c.stream.holdout = 1000;
  c.methods = {"H16c_hat", "EM-E", "Base"};
  c.epsilons = {0.5, 2};
  c.repetitions = 4;
  c.queries = 50;
  c.seed = 5;
  c.threads = 1;
  return c;
}

TEST(ExperimentTest, RowsInMethodEpsilonOrder) {
  const auto c = SmallConfig();
  const auto rows = RunExperiment(c, ExperimentData(c));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].method, "H16c_hat");
  EXPECT_EQ(rows[1].epsilon, 2.0);
  EXPECT_EQ(rows[4].method, "Base");
  for (const auto& row : rows) {
    EXPECT_EQ(row.repetitions, 4u);
    EXPECT_EQ(row.failures, 0u);
    EXPECT_TRUE(std::isfinite(row.mse_mean));
  }
}

TEST(ExperimentTest, BaseMatchesDirectEvaluation) {
  const auto c = SmallConfig();
  const auto data = ExperimentData(c);
  const std::vector<double> region(data.begin() + 1000, data.end());
  const auto w = ExperimentWorkload(c, region.size(), 2);
  double expected = 0;
  for (const auto& q : w.queries) {
    double s = 0;
    for (uint64_t k = q.first; k <= q.last; ++k) s += region[k - 1];
    expected += s * s;
  }
  EXPECT_NEAR(RunCell(c, data, "Base", 1.0, 2).mse, expected / w.queries.size(),
              1e-9 * expected);
}

TEST(ExperimentTest, IndependentOfThreadCount) {
  auto c = SmallConfig();
  const auto data = ExperimentData(c);
  std::ostringstream one, many;
  WriteExperimentCsv(RunExperiment(c, data), one);
  c.threads = 4;
  WriteExperimentCsv(RunExperiment(c, data), many);
  EXPECT_EQ(one.str(), many.str());
}

TEST(ExperimentTest, WorkloadIsSharedAcrossMethods) {
  const auto c = SmallConfig();
  const auto a = ExperimentWorkload(c, 2000, 3);
  const auto b = ExperimentWorkload(c, 2000, 3);
  const auto other = ExperimentWorkload(c, 2000, 4);
  ASSERT_EQ(a.queries.size(), b.queries.size());
  bool differs = false;
  for (size_t i = 0; i < a.queries.size(); ++i) {
    EXPECT_EQ(a.queries[i].first, b.queries[i].first);
    differs |= a.queries[i].first != other.queries[i].first;
  }
  EXPECT_TRUE(differs);
}

TEST(ExperimentTest, FailuresAreRecorded) {
  auto c = SmallConfig();
  c.stream.holdout = 0;
  c.methods = {"EM-E", "H16"};
  c.epsilons = {1};
  const auto rows = RunExperiment(c, ExperimentData(c));
  EXPECT_EQ(rows[0].failures, 4u);
  EXPECT_EQ(rows[0].repetitions, 0u);
  EXPECT_FALSE(rows[0].first_error.empty());
  EXPECT_TRUE(std::isnan(rows[0].mse_mean));
  EXPECT_EQ(rows[1].failures, 0u);
}

TEST(ExperimentConfigTest, ParsesAndValidates) {
  const auto cfg = ExperimentConfigFromJson(nlohmann::json::parse(R"j({
    "data": {"synthetic": "uniform(0,10)", "n": 100, "seed": 2},
    "B": 10, "r": 64, "m": 10, "methods": ["ToPS", "PAK"], "epsilons": [1],
    "repetitions": 3, "seed": 4, "perturber_epsilon": 0.5
  })j"));
  EXPECT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.repetitions, 3u);
  EXPECT_EQ(cfg.perturber_epsilon, 0.5);
  for (const char* bad : {
           R"j({"data": {"synthetic": "uniform(0,10)", "n": 10}, "methods": ["ToPS"], "epsilons": [1]})j",
           R"j({"data": {"synthetic": "uniform(0,10)", "n": 10}, "methods": ["X"], "epsilons": [1], "seed": 1})j",
           R"j({"data": {"synthetic": "uniform(0,10)", "n": 10}, "methods": ["ToPS"], "epsilons": [], "seed": 1})j",
           R"j({"data": {"n": 10}, "methods": ["ToPS"], "epsilons": [1], "seed": 1})j",
           R"j({"data": {"synthetic": "uniform(0,10)", "n": 10, "x": 1}, "methods": ["ToPS"], "epsilons": [1], "seed": 1})j",
           R"j({"methods": ["ToPS"], "epsilons": [1], "seed": 1})j"}) {
    EXPECT_THROW(ExperimentConfigFromJson(nlohmann::json::parse(bad)), ConfigError) << bad;
  }
}

TEST(ExperimentCsvTest, Header) {
  ExperimentRow row;
  row.method = "Base";
  row.epsilon = 1;
  row.repetitions = 2;
  std::ostringstream out;
  WriteExperimentCsv({row}, out);
  EXPECT_EQ(out.str(),
            "method,epsilon,mse_mean,mse_std,mse_median,theta_median,repetitions,"
            "failures\nBase,1,0,0,0,0,2,0\n");
}

}  // namespace
}  // namespace streamdp
