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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "streamdp/errors.h"

namespace streamdp {
namespace {

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameterError("epsilon must be positive and finite");
  }
}

void CheckUnit(double v) {
  if (!(v >= -1.0 && v <= 1.0)) {
    throw InvalidParameterError("mechanism input outside [-1, 1]");
  }
}

double Overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

SwParams SwParams::FromEpsilon(double epsilon) {
  CheckEpsilon(epsilon);
  const double e = std::exp(epsilon);
  const double half =
      (epsilon * e - e + 1.0) / (2.0 * e * (e - 1.0 - epsilon));
  return SwParams{epsilon, half, e / (2.0 * half * e + 1.0),
                  1.0 / (2.0 * half * e + 1.0)};
}

double SwPerturb(double v, const SwParams& params, RandomSource& rng) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidParameterError("square wave input outside [0, 1]");
  }
  const double b = params.half_width;
  if (rng.Bernoulli(params.InBandMass())) return rng.Uniform(v - b, v + b);
  // The out-of-band region has total length 1: [-b, v-b) then (v+b, 1+b].
  const double u = rng.Uniform();
  return u < v ? -b + u : v + b + (u - v);
}

DensityEstimate SwEstimate(std::span<const double> reports,
                           const SwParams& params, double upper_bound,
                           const SwEmOptions& options) {
  if (reports.empty()) throw InvalidParameterError("square wave: no reports");
  if (options.bins < 1) throw InvalidParameterError("square wave: bins < 1");
  const size_t d = options.bins;
  const double b = params.half_width;
  const double out_lo = -b;
  const double out_width = (1.0 + 2.0 * b) / static_cast<double>(d);

  std::vector<double> counts(d, 0.0);
  for (double y : reports) {
    const double pos = std::floor((y - out_lo) / out_width);
    counts[static_cast<size_t>(std::clamp(pos, 0.0, static_cast<double>(d - 1)))] += 1.0;
  }
  std::vector<size_t> observed;
  for (size_t j = 0; j < d; ++j) {
    if (counts[j] > 0) observed.push_back(j);
  }

  // transition[k * d + i] = Pr[report in observed bin k | input at centre i].
  std::vector<double> transition(observed.size() * d);
  for (size_t k = 0; k < observed.size(); ++k) {
    const double y0 = out_lo + static_cast<double>(observed[k]) * out_width;
    const double y1 = y0 + out_width;
    for (size_t i = 0; i < d; ++i) {
      const double c = (static_cast<double>(i) + 0.5) / static_cast<double>(d);
      const double in = Overlap(y0, y1, c - b, c + b);
      transition[k * d + i] = params.p * in + params.q * (out_width - in);
    }
  }

  const double n = static_cast<double>(reports.size());
  std::vector<double> f(d, 1.0 / static_cast<double>(d));
  std::vector<double> next(d);
  std::vector<double> mix(observed.size());
  double previous = -std::numeric_limits<double>::infinity();
  DensityEstimate out;
  for (size_t iter = 0; iter < options.max_iterations; ++iter) {
    double ll = 0.0;
    for (size_t k = 0; k < observed.size(); ++k) {
      const double* row = &transition[k * d];
      double s = 0.0;
      for (size_t i = 0; i < d; ++i) s += row[i] * f[i];
      mix[k] = s;
      ll += counts[observed[k]] * std::log(s);
    }
    out.iterations = iter + 1;
    out.log_likelihood = ll;
    if (ll - previous < options.tolerance * std::fabs(ll)) break;
    previous = ll;
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t k = 0; k < observed.size(); ++k) {
      const double* row = &transition[k * d];
      const double weight = counts[observed[k]] / (n * mix[k]);
      for (size_t i = 0; i < d; ++i) next[i] += row[i] * weight;
    }
    double total = 0.0;
    for (size_t i = 0; i < d; ++i) {
      f[i] *= next[i];
      total += f[i];
    }
    for (double& x : f) x /= total;
  }

  out.frequency = std::move(f);
  out.bin_values.resize(d);
  for (size_t i = 0; i < d; ++i) {
    out.bin_values[i] =
        (static_cast<double>(i) + 0.5) * upper_bound / static_cast<double>(d);
  }
  return out;
}

DensityEstimate PruneDensity(DensityEstimate estimate) {
  constexpr size_t kWindow = 5;
  constexpr double kSmall = 0.001;
  constexpr double kMaxRemoved = 0.99;
  auto& f = estimate.frequency;
  if (f.size() < kWindow) return estimate;
  const double total = std::accumulate(f.begin(), f.end(), 0.0);
  for (size_t w = 0; w + kWindow <= f.size(); ++w) {
    if (!std::all_of(f.begin() + w, f.begin() + w + kWindow,
                     [](double x) { return x < kSmall; })) {
      continue;
    }
    const double removed = std::accumulate(f.begin() + w, f.end(), 0.0);
    if (removed >= kMaxRemoved * total) return estimate;
    std::fill(f.begin() + w, f.end(), 0.0);
    const double kept = total - removed;
    for (double& x : f) x /= kept;
    estimate.cutoff = w;
    return estimate;
  }
  return estimate;
}

double HmWorstCaseVariance(double epsilon) {
  CheckEpsilon(epsilon);
  const double sr = std::pow((std::exp(epsilon) + 1.0) / std::expm1(epsilon), 2);
  if (epsilon <= kHmCutoff) return sr;
  const double half = std::exp(epsilon / 2.0);
  return (sr + (half + 3.0) / (3.0 * (half - 1.0))) / half;
}

double LdpThresholdError(const DensityEstimate& estimate, double theta,
                         double epsilon, double r) {
  double excess = 0.0;
  for (size_t i = 0; i < estimate.bin_values.size(); ++i) {
    const double t = estimate.bin_values[i];
    if (t > theta) excess += estimate.frequency[i] * (t - theta);
  }
  const double variance = (theta / 2.0) * (theta / 2.0) * HmWorstCaseVariance(epsilon);
  return r / 3.0 * variance + r * r / 24.0 * excess * excess;
}

ThresholdDecision LdpThreshold(const DensityEstimate& estimate, double epsilon,
                               double r, std::span<const double> grid) {
  if (estimate.frequency.size() != estimate.bin_values.size()) {
    throw InvalidParameterError("density estimate is malformed");
  }
  if (std::all_of(estimate.frequency.begin(), estimate.frequency.end(),
                  [](double x) { return x == 0.0; })) {
    throw InvalidParameterError("density estimate has no mass");
  }
  std::span<const double> candidates = grid.empty() ? estimate.bin_values : grid;
  ThresholdDecision decision;
  decision.method = ThresholdMethod::kSwW;
  decision.candidates.assign(candidates.begin(), candidates.end());
  decision.trace.reserve(candidates.size());
  double best = std::numeric_limits<double>::infinity();
  for (double theta : candidates) {
    const double err = LdpThresholdError(estimate, theta, epsilon, r);
    decision.trace.push_back(err);
    if (err < best || (err == best && theta < decision.theta)) {
      best = err;
      decision.theta = theta;
    }
  }
  return decision;
}

double SrBound(double epsilon) {
  return (std::exp(epsilon) + 1.0) / std::expm1(epsilon);
}

double SrPerturb(double v, double epsilon, RandomSource& rng) {
  CheckUnit(v);
  CheckEpsilon(epsilon);
  const bool up = rng.Bernoulli(0.5 + v / 2.0);
  const bool keep = rng.Bernoulli(std::exp(epsilon) / (std::exp(epsilon) + 1.0));
  const bool positive = up == keep;
  return positive ? SrBound(epsilon) : -SrBound(epsilon);
}

PmParams PmParams::FromEpsilon(double epsilon) {
  CheckEpsilon(epsilon);
  const double half = std::exp(epsilon / 2.0);
  const double z = (half - 1.0) / (half + 1.0);
  return PmParams{epsilon, (half + 1.0) / (half - 1.0), half / 2.0 * z,
                  z / (2.0 * half)};
}

double PmParams::Left(double v) const {
  const double half = std::exp(epsilon / 2.0);
  return (half * v - 1.0) / (half - 1.0);
}

double PmParams::Right(double v) const {
  const double half = std::exp(epsilon / 2.0);
  return (half * v + 1.0) / (half - 1.0);
}

double PmPerturb(double v, double epsilon, RandomSource& rng) {
  CheckUnit(v);
  const PmParams pm = PmParams::FromEpsilon(epsilon);
  const double lo = pm.Left(v);
  const double hi = pm.Right(v);
  if (rng.Bernoulli(pm.p * (hi - lo))) return rng.Uniform(lo, hi);
  // Outside the band: [-s, lo) then (hi, s], total length 2s - (hi - lo).
  const double left = lo + pm.bound;
  const double right = pm.bound - hi;
  const double u = rng.Uniform() * (left + right);
  return u < left ? -pm.bound + u : hi + (u - left);
}

HmReport HmPerturb(double v, double epsilon, RandomSource& rng) {
  CheckUnit(v);
  CheckEpsilon(epsilon);
  if (epsilon > kHmCutoff && rng.Bernoulli(-std::expm1(-epsilon / 2.0))) {
    return {PmPerturb(v, epsilon, rng), true};
  }
  return {SrPerturb(v, epsilon, rng), false};
}

}  // namespace streamdp
