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

#include "streamdp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streamdp/errors.h"

namespace streamdp {

double LaplaceSample(const LaplaceParams& params, RandomSource& rng) {
  if (!(params.scale > 0.0) || !std::isfinite(params.scale)) {
    throw InvalidParameterError("laplace scale must be positive");
  }
  const double u = rng.UniformOpen() - 0.5;  // (-0.5, 0.5)
  const double mag = -params.scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -mag : mag;
}

double LaplaceCdf(double x) {
  return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

double LaplaceQuantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InvalidParameterError("laplace quantile needs u in (0, 1)");
  }
  return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
}

namespace {

void CheckCandidates(const EmCandidateSet& set, double epsilon) {
  if (set.scores.empty()) {
    throw InvalidParameterError("exponential mechanism: empty candidate set");
  }
  if (!(set.sensitivity > 0.0)) {
    throw InvalidParameterError("exponential mechanism: sensitivity <= 0");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidParameterError("exponential mechanism: epsilon <= 0");
  }
}

double ExponentFactor(const EmCandidateSet& set, double epsilon) {
  return epsilon / ((set.monotone ? 1.0 : 2.0) * set.sensitivity);
}

}  // namespace

size_t ExpMechanism(const EmCandidateSet& set, double epsilon,
                    RandomSource& rng) {
  CheckCandidates(set, epsilon);
  const double factor = ExponentFactor(set, epsilon);
  size_t best = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < set.scores.size(); ++i) {
    const double gumbel = -std::log(-std::log(rng.UniformOpen()));
    const double key = factor * set.scores[i] + gumbel;
    if (key > best_key) {
      best_key = key;
      best = i;
    }
  }
  return best;
}

std::vector<double> ExpMechanismProbabilities(const EmCandidateSet& set,
                                              double epsilon) {
  CheckCandidates(set, epsilon);
  const double factor = ExponentFactor(set, epsilon);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double s : set.scores) max_logit = std::max(max_logit, factor * s);
  std::vector<double> probs(set.scores.size());
  double total = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::exp(factor * set.scores[i] - max_logit);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

SmoothSensParams SmoothSensParams::ForQuantile(size_t rank, double epsilon,
                                               double delta) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidParameterError("delta must lie in (0, 1)");
  }
  return SmoothSensParams{rank, epsilon / (-2.0 * std::log(delta)),
                          epsilon / 2.0, epsilon, delta};
}

size_t QuantileRank(double percentile, size_t m) {
  if (m == 0) throw InvalidParameterError("quantile of empty holdout");
  const double raw = std::ceil(percentile / 100.0 * static_cast<double>(m));
  return static_cast<size_t>(std::clamp(raw, 1.0, static_cast<double>(m)));
}

double SmoothSensitivityQuantile(std::span<const double> sorted_values,
                                 const SmoothSensParams& params,
                                 double upper_bound) {
  const size_t m = sorted_values.size();
  if (m == 0) throw InvalidParameterError("smooth sensitivity: empty input");
  if (!std::is_sorted(sorted_values.begin(), sorted_values.end())) {
    throw InvalidParameterError("smooth sensitivity: input must be sorted");
  }
  if (params.rank < 1 || params.rank > m) {
    throw InvalidParameterError("smooth sensitivity: rank outside [1, m]");
  }
  if (!(params.smoothing > 0.0)) {
    throw InvalidParameterError("smooth sensitivity: smoothing must be > 0");
  }
  const auto at = [&](long long i) -> double {
    if (i < 1) return 0.0;
    if (i > static_cast<long long>(m)) return upper_bound;
    return sorted_values[static_cast<size_t>(i - 1)];
  };
  const long long rank = static_cast<long long>(params.rank);
  double best = 0.0;
  for (long long k = 0; k <= static_cast<long long>(m) + 1; ++k) {
    const double decay = std::exp(-params.smoothing * static_cast<double>(k));
    // No gap exceeds the full range, so later k cannot improve the max.
    if (decay * upper_bound <= best) break;
    double widest = 0.0;
    for (long long t = 0; t <= k + 1; ++t) {
      widest = std::max(widest, at(rank + t) - at(rank + t - k - 1));
    }
    best = std::max(best, decay * widest);
  }
  return best;
}

}  // namespace streamdp
