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

#ifndef STREAMDP_EXPERIMENT_H_
#define STREAMDP_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "streamdp/harness.h"
#include "streamdp/pipeline.h"

namespace streamdp {

// Methods:
//   H2, H16, H16c, H16c_hat  hierarchy variants at a fixed public theta
//   EM-E, S-PAK, S-P          threshold selectors feeding the H16c_hat perturber
//   ToPS, PAK, ToPL           full pipelines with their default settings
//   Base                      publishes 0 everywhere
struct ExperimentConfig {
  // Data source: a synthetic spec or a file path.
  std::optional<SyntheticSpec> synthetic;
  size_t n = 0;
  uint64_t data_seed = 0;
  std::string input_path;
  LoadOptions load;

  StreamConfig stream;
  SmootherOptions smoother;
  std::vector<std::string> methods;
  std::vector<double> epsilons;
  size_t repetitions = 100;
  size_t queries = 200;
  QueryMode query_mode = QueryMode::kUniformLength;
  uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency

  double fixed_percentile = 95.0;  // theta for the H* methods
  bool truncate_truth = false;     // score against data clipped at that theta
  // When set, epsilon sweeps the threshold budget only and the perturber
  // keeps this budget.
  std::optional<double> perturber_epsilon;

  std::string output_path;

  void Validate() const;
};

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& doc);

struct ExperimentRow {
  std::string method;
  double epsilon = 0.0;
  double mse_mean = 0.0;
  double mse_std = 0.0;
  double mse_median = 0.0;
  double theta_median = 0.0;
  size_t repetitions = 0;  // successful cells
  size_t failures = 0;
  std::string first_error;
  std::vector<double> mses;  // per repetition, in repetition order
};

bool IsKnownMethod(const std::string& method);

// Loads or generates the experiment data once.
std::vector<double> ExperimentData(const ExperimentConfig& config);

// Runs methods x epsilons x repetitions. Rows come back in (method, epsilon)
// order regardless of the worker count.
std::vector<ExperimentRow> RunExperiment(const ExperimentConfig& config,
                                         std::span<const double> data);

// Query workload shared by every method in repetition `rep`.
QueryWorkload ExperimentWorkload(const ExperimentConfig& config, uint64_t region,
                                 size_t rep);

// One cell: MSE and theta of `method` at `epsilon` in repetition `rep`.
struct CellResult {
  double mse;
  double theta;
};
CellResult RunCell(const ExperimentConfig& config, std::span<const double> data,
                   const std::string& method, double epsilon, size_t rep);

// method,epsilon,mse_mean,mse_std,mse_median,theta_median,repetitions,failures
void WriteExperimentCsv(const std::vector<ExperimentRow>& rows, std::ostream& out);

}  // namespace streamdp

#endif  // STREAMDP_EXPERIMENT_H_
