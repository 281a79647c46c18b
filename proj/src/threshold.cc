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

#include "streamdp/threshold.h"

#include <algorithm>
#include <cmath>

#include "streamdp/errors.h"
#include "streamdp/mechanisms.h"

namespace streamdp {

void StreamConfig::Validate() const {
  if (!(upper_bound > 0.0)) throw InvalidParameterError("B must be > 0");
  if (fanout < 2) throw InvalidParameterError("fan-out must be >= 2");
  if (range_limit < static_cast<uint64_t>(fanout)) {
    throw InvalidParameterError("range limit r must be >= fan-out b");
  }
  if (!(epsilon > 0.0)) throw InvalidParameterError("epsilon must be > 0");
  if (!(bias_scale > 0.0)) throw InvalidParameterError("c must be > 0");
  if (!(grid_stride > 0.0) || grid_stride > upper_bound) {
    throw InvalidParameterError("grid stride must lie in (0, B]");
  }
}

std::vector<double> StreamConfig::CandidateGrid() const {
  Validate();
  std::vector<double> grid;
  const auto count = static_cast<size_t>(std::floor(upper_bound / grid_stride));
  grid.reserve(count + 1);
  for (size_t i = 1; i <= count; ++i) {
    grid.push_back(static_cast<double>(i) * grid_stride);
  }
  if (grid.empty() || grid.back() < upper_bound) grid.push_back(upper_bound);
  return grid;
}

std::string ToString(ThresholdMethod method) {
  switch (method) {
    case ThresholdMethod::kEmE: return "EM-E";
    case ThresholdMethod::kSPak: return "S-PAK";
    case ThresholdMethod::kSP: return "S-P";
    case ThresholdMethod::kFixed: return "fixed";
    case ThresholdMethod::kSwW: return "SW-W";
  }
  return "fixed";
}

ThresholdMethod ThresholdMethodFromString(const std::string& name) {
  for (auto m : {ThresholdMethod::kEmE, ThresholdMethod::kSPak,
                 ThresholdMethod::kSP, ThresholdMethod::kFixed,
                 ThresholdMethod::kSwW}) {
    if (ToString(m) == name) return m;
  }
  throw ConfigError("unknown threshold method: " + name);
}

double NoisePenaltySlope(const StreamConfig& config, size_t m) {
  const double b = config.fanout;
  const double r = static_cast<double>(config.range_limit);
  const double log_r = std::log(r) / std::log(b);
  return 3.0 * static_cast<double>(m) /
         (config.bias_scale * r * config.epsilon) *
         std::sqrt(2.0 * (b - 1.0) * log_r * log_r * log_r);
}

std::vector<size_t> CountAtOrBelow(std::span<const double> values,
                                   std::span<const double> candidates) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<size_t> counts(candidates.size());
  size_t pos = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0 && candidates[i] < candidates[i - 1]) {
      throw InvalidParameterError("candidate grid must be ascending");
    }
    while (pos < sorted.size() && sorted[pos] <= candidates[i]) ++pos;
    counts[i] = pos;
  }
  return counts;
}

std::vector<double> QualityScores(std::span<const double> values,
                                  const StreamConfig& config,
                                  std::span<const double> candidates) {
  if (values.empty()) {
    throw InvalidParameterError("quality scores: empty holdout");
  }
  config.Validate();
  for (double v : values) {
    if (!(v >= 0.0 && v <= config.upper_bound)) {
      throw InvalidParameterError("quality scores: holdout value outside [0, B]");
    }
  }
  const size_t m = values.size();
  const double slope = NoisePenaltySlope(config, m);
  const std::vector<size_t> below = CountAtOrBelow(values, candidates);
  std::vector<double> scores(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    const double above = static_cast<double>(m - below[i]);
    scores[i] = -slope * candidates[i] - above;
  }
  return scores;
}

std::vector<double> QualityScores(std::span<const double> values,
                                  const StreamConfig& config) {
  const std::vector<double> grid = config.CandidateGrid();
  return QualityScores(values, config, grid);
}

ThresholdDecision EmThreshold(std::span<const double> values,
                              const StreamConfig& config,
                              double threshold_epsilon, RandomSource& rng) {
  ThresholdDecision decision;
  decision.method = ThresholdMethod::kEmE;
  decision.epsilon = threshold_epsilon;
  decision.holdout = values.size();
  decision.candidates = config.CandidateGrid();
  decision.trace = QualityScores(values, config, decision.candidates);
  EmCandidateSet set{decision.trace, 1.0, config.monotone_em};
  decision.theta = decision.candidates[ExpMechanism(set, threshold_epsilon, rng)];
  return decision;
}

namespace {

struct QuantileNoise {
  double quantile;
  double smooth_sensitivity;
  double scaler;
  double smoothing;
};

QuantileNoise PrepareQuantile(std::span<const double> values, double percentile,
                              double epsilon, std::optional<double> delta,
                              const StreamConfig& config) {
  if (values.empty()) throw InvalidParameterError("empty holdout");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  const double d = delta.value_or(1.0 / (m * m));
  // A single value gives delta = 1; nudge it inside (0, 1).
  const double usable_delta = d >= 1.0 ? 0.5 : d;
  const size_t rank = QuantileRank(percentile, sorted.size());
  const SmoothSensParams params =
      SmoothSensParams::ForQuantile(rank, epsilon, usable_delta);
  return QuantileNoise{sorted[rank - 1],
                       SmoothSensitivityQuantile(sorted, params,
                                                 config.upper_bound),
                       params.scaler, params.smoothing};
}

}  // namespace

ThresholdDecision PakThreshold(std::span<const double> values,
                               const PakParams& params,
                               const StreamConfig& config, double epsilon,
                               RandomSource& rng) {
  if (!(params.beta > 0.0 && params.beta < 1.0)) {
    throw InvalidParameterError("PAK failure bound must lie in (0, 1)");
  }
  const QuantileNoise q =
      PrepareQuantile(values, params.percentile, epsilon, params.delta, config);
  const double tail = LaplaceQuantile(1.0 - params.beta);
  const double denom =
      1.0 - std::expm1(q.smoothing) * tail / q.scaler;
  if (!(denom > 0.0)) {
    throw InvalidParameterError("PAK correction factor is degenerate");
  }
  const double kappa = 1.0 / denom;
  const double z = LaplaceSample({1.0}, rng);
  const double raw =
      q.quantile + kappa * q.smooth_sensitivity / q.scaler * (z + tail);

  ThresholdDecision decision;
  decision.method = ThresholdMethod::kSPak;
  decision.theta = std::clamp(raw, config.grid_stride, config.upper_bound);
  decision.epsilon = epsilon;
  decision.holdout = values.size();
  decision.quantile = q.quantile;
  decision.smooth_sensitivity = q.smooth_sensitivity;
  decision.noise = z;
  decision.kappa = kappa;
  return decision;
}

ThresholdDecision SpThreshold(std::span<const double> values,
                              double percentile, double epsilon,
                              std::optional<double> delta,
                              const StreamConfig& config, RandomSource& rng) {
  const QuantileNoise q =
      PrepareQuantile(values, percentile, epsilon, delta, config);
  const double z = LaplaceSample({1.0}, rng);
  ThresholdDecision decision;
  decision.method = ThresholdMethod::kSP;
  decision.theta = std::clamp(
      q.quantile + q.smooth_sensitivity / q.scaler * z, config.grid_stride,
      config.upper_bound);
  decision.epsilon = epsilon;
  decision.holdout = values.size();
  decision.quantile = q.quantile;
  decision.smooth_sensitivity = q.smooth_sensitivity;
  decision.noise = z;
  return decision;
}

}  // namespace streamdp
