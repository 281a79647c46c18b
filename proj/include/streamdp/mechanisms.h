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

#ifndef STREAMDP_MECHANISMS_H_
#define STREAMDP_MECHANISMS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "streamdp/random.h"

namespace streamdp {

struct LaplaceParams {
  double scale;  // beta = sensitivity / epsilon
};

// Draws from Lap(beta) by inverting the CDF of one open-interval uniform.
double LaplaceSample(const LaplaceParams& params, RandomSource& rng);

// CDF and quantile of the standard (scale 1) Laplace distribution.
double LaplaceCdf(double x);
double LaplaceQuantile(double u);

struct EmCandidateSet {
  std::vector<double> scores;  // one quality score per candidate, in order
  double sensitivity = 1.0;
  // All scores move in the same direction between neighbors, which allows
  // the exponent divisor 1 instead of 2.
  bool monotone = false;
};

// Samples an index with probability proportional to
// exp(epsilon * score / (k * sensitivity)), k = 1 if monotone else 2.
// Uses the Gumbel-max construction so arbitrarily large score magnitudes
// never overflow.
size_t ExpMechanism(const EmCandidateSet& set, double epsilon,
                    RandomSource& rng);

// Exact selection probabilities of ExpMechanism, normalized in log space.
std::vector<double> ExpMechanismProbabilities(const EmCandidateSet& set,
                                              double epsilon);

// Laplace-noise (epsilon, delta) instantiation of smooth sensitivity.
struct SmoothSensParams {
  size_t rank;        // 1-based rank P of the released order statistic
  double smoothing;   // b, must satisfy b <= epsilon / (-2 log delta)
  double scaler;      // a = epsilon / 2
  double epsilon;
  double delta;

  static SmoothSensParams ForQuantile(size_t rank, double epsilon,
                                      double delta);
};

// 1-based rank of the empirical p-quantile (p in percent) over m values.
size_t QuantileRank(double percentile, size_t m);

// Smooth sensitivity of the empirical order statistic of rank P over the
// sorted holdout, with V(i) = 0 below index 1 and = upper_bound above m.
double SmoothSensitivityQuantile(std::span<const double> sorted_values,
                                 const SmoothSensParams& params,
                                 double upper_bound);

}  // namespace streamdp

#endif  // STREAMDP_MECHANISMS_H_
