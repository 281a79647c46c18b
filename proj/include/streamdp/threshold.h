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

#ifndef STREAMDP_THRESHOLD_H_
#define STREAMDP_THRESHOLD_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamdp/random.h"

namespace streamdp {

// Parameters shared by both pipelines.
struct StreamConfig {
  double upper_bound = 1000.0;    // B, public bound on readings
  uint64_t range_limit = 1 << 20;  // r, maximal query range
  int fanout = 16;                 // b
  double epsilon = 0.1;            // budget of the perturbation stage
  size_t holdout = 65536;          // m
  double bias_scale = 60.0;        // c
  double grid_stride = 1.0;        // candidate spacing; 1 gives {1..B}
  bool monotone_em = true;

  void Validate() const;
  // Candidate thresholds stride, 2*stride, ... up to and including B.
  std::vector<double> CandidateGrid() const;
};

enum class ThresholdMethod { kEmE, kSPak, kSP, kFixed, kSwW };

std::string ToString(ThresholdMethod method);
ThresholdMethod ThresholdMethodFromString(const std::string& name);

struct ThresholdDecision {
  double theta = 0.0;
  ThresholdMethod method = ThresholdMethod::kFixed;
  double epsilon = 0.0;  // budget spent selecting theta
  size_t holdout = 0;
  // EM-E: candidates and their quality scores. Smooth-sensitivity methods:
  // quantile, smooth sensitivity, noise draw and inflation factor.
  std::vector<double> candidates;
  std::vector<double> trace;
  std::optional<double> quantile;
  std::optional<double> smooth_sensitivity;
  std::optional<double> noise;
  std::optional<double> kappa;
};

// Per-unit-theta noise penalty (3m/(c r eps)) * sqrt(2 (b-1) log_b^3 r).
double NoisePenaltySlope(const StreamConfig& config, size_t m);

// Quality score of every candidate in `candidates`: minus the scaled noise
// standard deviation minus the number of holdout values above theta.
// Changing one holdout value moves every score by at most 1, all in the
// same direction.
std::vector<double> QualityScores(std::span<const double> values,
                                  const StreamConfig& config,
                                  std::span<const double> candidates);
std::vector<double> QualityScores(std::span<const double> values,
                                  const StreamConfig& config);

// Number of values v with v <= theta, for each candidate (sorted ascending).
std::vector<size_t> CountAtOrBelow(std::span<const double> values,
                                   std::span<const double> candidates);

ThresholdDecision EmThreshold(std::span<const double> values,
                              const StreamConfig& config,
                              double threshold_epsilon, RandomSource& rng);

struct PakParams {
  double percentile = 99.575;
  double beta = 0.3 * 0.02;
  std::optional<double> delta;  // defaults to 1 / m^2
};

// PAK-style inflated smooth-sensitivity quantile. theta is clamped to
// [grid_stride, B], the range of the candidate grid.
ThresholdDecision PakThreshold(std::span<const double> values,
                               const PakParams& params,
                               const StreamConfig& config, double epsilon,
                               RandomSource& rng);

// Plain smooth-sensitivity quantile: x_p + SS * Z / a, clamped as above.
ThresholdDecision SpThreshold(std::span<const double> values,
                              double percentile, double epsilon,
                              std::optional<double> delta,
                              const StreamConfig& config, RandomSource& rng);

inline double Truncate(double v, double theta) { return v < theta ? v : theta; }

}  // namespace streamdp

#endif  // STREAMDP_THRESHOLD_H_
