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

#ifndef STREAMDP_LDP_H_
#define STREAMDP_LDP_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "streamdp/random.h"
#include "streamdp/threshold.h"

namespace streamdp {

// Square Wave: reports land within +-half_width of the input with density
// `p` and elsewhere on [-half_width, 1 + half_width] with density `q`.
struct SwParams {
  double epsilon;
  double half_width;
  double p;
  double q;

  static SwParams FromEpsilon(double epsilon);
  double InBandMass() const { return 2.0 * half_width * p; }
};

double SwPerturb(double v, const SwParams& params, RandomSource& rng);

struct SwEmOptions {
  size_t bins = 1024;
  double tolerance = 1e-6;  // relative log-likelihood improvement
  size_t max_iterations = 10000;
};

// Binned density over [0, B]. bin_values are the bin centres.
struct DensityEstimate {
  std::vector<double> bin_values;
  std::vector<double> frequency;
  std::optional<size_t> cutoff;  // first pruned bin, if pruning applied
  size_t iterations = 0;
  double log_likelihood = 0.0;
};

// Maximum-likelihood binned density from Square Wave reports by
// expectation-maximization, with no smoothing step. `reports` are on the SW
// output scale (inputs mapped from [0, B] to [0, 1]).
DensityEstimate SwEstimate(std::span<const double> reports,
                           const SwParams& params, double upper_bound,
                           const SwEmOptions& options = {});

// Zeroes every bin from the first index w with five consecutive bins below
// 0.1%, then renormalizes. Skipped if it would remove >= 99% of the mass.
DensityEstimate PruneDensity(DensityEstimate estimate);

// Worst-case variance of the hybrid mechanism on [-1, 1].
double HmWorstCaseVariance(double epsilon);

// Modelled range-query error of threshold theta for the local pipeline:
// (r/3) (theta/2)^2 Var_HM + (r^2/24) (sum_{t > theta} f_t (t - theta))^2.
double LdpThresholdError(const DensityEstimate& estimate, double theta,
                         double epsilon, double r);

// Grid threshold minimizing LdpThresholdError; ties go to the smaller theta.
// An empty grid means the estimate's bin values.
ThresholdDecision LdpThreshold(const DensityEstimate& estimate, double epsilon,
                               double r, std::span<const double> grid = {});

// Stochastic rounding plus binary randomized response; the report is
// +-(e^eps + 1)/(e^eps - 1), unbiased for v in [-1, 1].
double SrPerturb(double v, double epsilon, RandomSource& rng);
double SrBound(double epsilon);

struct PmParams {
  double epsilon;
  double bound;  // s, output domain [-s, s]
  double p;      // density inside [l(v), r(v)]
  double q;      // density outside

  static PmParams FromEpsilon(double epsilon);
  double Left(double v) const;
  double Right(double v) const;
};

double PmPerturb(double v, double epsilon, RandomSource& rng);

struct HmReport {
  double value;
  bool piecewise;  // true when the PM branch was used
};

inline constexpr double kHmCutoff = 0.61;

// PM with probability 1 - e^{-eps/2} and SR otherwise; SR only when
// eps <= 0.61.
HmReport HmPerturb(double v, double epsilon, RandomSource& rng);

// Affine map between readings in [0, theta] and the mechanisms' [-1, 1].
inline double EncodeUnit(double v, double theta) { return 2.0 * v / theta - 1.0; }
inline double DecodeUnit(double y, double theta) { return (y + 1.0) * theta / 2.0; }

}  // namespace streamdp

#endif  // STREAMDP_LDP_H_
