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

#include "streamdp/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "streamdp/errors.h"

namespace streamdp {
namespace {

// Sub-stream ids of the pipeline's random source.
constexpr uint64_t kThresholdStream = 1;
constexpr uint64_t kPerturberStream = 2;
constexpr uint64_t kClientStream = 3;

double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

ThresholdMethod DefaultMethod(const PipelineOptions& o) {
  if (o.threshold_method) return *o.threshold_method;
  if (o.fixed_theta) return ThresholdMethod::kFixed;
  switch (o.mode) {
    case PipelineMode::kTops: return ThresholdMethod::kEmE;
    case PipelineMode::kPak: return ThresholdMethod::kSPak;
    case PipelineMode::kTopl: return ThresholdMethod::kSwW;
  }
  return ThresholdMethod::kEmE;
}

double ThresholdBudget(const PipelineOptions& o) {
  if (o.threshold_epsilon) return *o.threshold_epsilon;
  return o.sequential_split ? o.stream.epsilon / 2.0 : o.stream.epsilon;
}

double PerturberBudget(const PipelineOptions& o) {
  return o.sequential_split ? o.stream.epsilon / 2.0 : o.stream.epsilon;
}

void CheckReadings(std::span<const double> stream, double upper_bound) {
  for (size_t i = 0; i < stream.size(); ++i) {
    if (!(stream[i] >= 0.0 && stream[i] <= upper_bound)) {
      throw DataError("reading " + std::to_string(i + 1) +
                      " lies outside [0, B]");
    }
  }
}

ThresholdDecision SelectFromHoldout(std::span<const double> holdout,
                                    const PipelineOptions& o) {
  const ThresholdMethod method = DefaultMethod(o);
  const double eps = ThresholdBudget(o);
  RandomSource rng(o.seed, kThresholdStream);
  switch (method) {
    case ThresholdMethod::kFixed: {
      if (!o.fixed_theta) throw ConfigError("fixed threshold needs a theta");
      ThresholdDecision d;
      d.method = ThresholdMethod::kFixed;
      d.theta = *o.fixed_theta;
      d.holdout = holdout.size();
      if (!(d.theta > 0.0)) throw ConfigError("fixed threshold must be > 0");
      return d;
    }
    case ThresholdMethod::kEmE:
      if (holdout.empty()) throw InvalidParameterError("EM-E needs m >= 1");
      return EmThreshold(holdout, o.stream, eps, rng);
    case ThresholdMethod::kSPak:
      if (holdout.empty()) throw InvalidParameterError("S-PAK needs m >= 1");
      return PakThreshold(holdout, o.pak, o.stream, eps, rng);
    case ThresholdMethod::kSP:
      if (holdout.empty()) throw InvalidParameterError("S-P needs m >= 1");
      return SpThreshold(holdout, o.sp_percentile, eps, o.pak.delta, o.stream,
                         rng);
    case ThresholdMethod::kSwW: {
      if (holdout.empty()) {
        throw InvalidParameterError("threshold phase requires at least one report");
      }
      const SwParams sw = SwParams::FromEpsilon(eps);
      std::vector<double> reports;
      reports.reserve(holdout.size());
      for (double v : holdout) {
        reports.push_back(SwPerturb(v / o.stream.upper_bound, sw, rng));
      }
      DensityEstimate est =
          PruneDensity(SwEstimate(reports, sw, o.stream.upper_bound, o.sw));
      ThresholdDecision d = LdpThreshold(
          est, PerturberBudget(o), static_cast<double>(o.stream.range_limit));
      d.epsilon = eps;
      d.holdout = holdout.size();
      return d;
    }
  }
  throw ConfigError("unsupported threshold method");
}

}  // namespace

std::string ToString(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kTops: return "ToPS";
    case PipelineMode::kTopl: return "ToPL";
    case PipelineMode::kPak: return "PAK";
  }
  return "ToPS";
}

PipelineMode PipelineModeFromString(const std::string& name) {
  for (auto m : {PipelineMode::kTops, PipelineMode::kTopl, PipelineMode::kPak}) {
    if (ToString(m) == name) return m;
  }
  throw ConfigError("unknown pipeline mode: " + name);
}

ThresholdDecision SelectThreshold(std::span<const double> stream,
                                  const PipelineOptions& options) {
  options.stream.Validate();
  CheckReadings(stream, options.stream.upper_bound);
  const size_t m = std::min(options.stream.holdout, stream.size());
  return SelectFromHoldout(stream.first(m), options);
}

PipelineRun::Answer PipelineRun::AnswerRangeQuery(uint64_t first,
                                                  uint64_t last) const {
  if (first < 1 || first > last) {
    throw InvalidParameterError("range query needs 1 <= i <= j");
  }
  if (last - first + 1 > range_limit) {
    throw InvalidParameterError("range query longer than the range limit r");
  }
  const uint64_t end = holdout + published.size();
  if (last > end) throw InvalidParameterError("range query past stream end");
  Answer answer{0.0, first <= holdout};
  const uint64_t lo = std::max<uint64_t>(first, holdout + 1);
  if (lo > last) return answer;
  if (hierarchy) {
    answer.value = hierarchy->RangeSum(lo - holdout - 1, last - holdout - 1);
  } else {
    for (uint64_t k = lo; k <= last; ++k) answer.value += published[k - holdout - 1];
  }
  return answer;
}

PipelineRun RunPipeline(std::span<const double> stream,
                        const PipelineOptions& options) {
  const StreamConfig& config = options.stream;
  config.Validate();
  CheckReadings(stream, config.upper_bound);
  const ThresholdMethod method = DefaultMethod(options);
  if (method != ThresholdMethod::kFixed && config.holdout == 0) {
    throw InvalidParameterError("threshold phase requires m >= 1");
  }

  PipelineRun run;
  run.mode = options.mode;
  run.range_limit = config.range_limit;
  const size_t m = std::min(config.holdout, stream.size());
  run.holdout = m;

  auto t0 = std::chrono::steady_clock::now();
  run.threshold = SelectFromHoldout(stream.first(m), options);
  run.threshold_ms = MillisSince(t0);
  const double theta = run.threshold.theta;
  if (theta >= config.upper_bound) {
    run.warnings.push_back("threshold >= B: truncation is a no-op");
  }
  if (!(theta > 0.0)) {
    throw InvalidParameterError("threshold stage returned theta <= 0");
  }

  const double eps = PerturberBudget(options);
  const std::string holdout_scope = "readings 1.." + std::to_string(m);
  const std::string stream_scope = "readings " + std::to_string(m + 1) + "..";
  if (method != ThresholdMethod::kFixed) {
    run.ledger.push_back({"threshold:" + ToString(run.threshold.method),
                          run.threshold.epsilon,
                          options.sequential_split ? "sequential" : "parallel",
                          holdout_scope});
  }

  std::span<const double> rest = stream.subspan(m);
  run.published.reserve(rest.size());
  t0 = std::chrono::steady_clock::now();

  if (options.mode == PipelineMode::kTopl) {
    RandomSource rng(options.seed, kClientStream);
    for (double v : rest) {
      const HmReport report = HmPerturb(EncodeUnit(Truncate(v, theta), theta), eps, rng);
      run.published.push_back(DecodeUnit(report.value, theta));
    }
    run.ledger.push_back({"perturber:HM", eps, "parallel", stream_scope});
    run.publish_ms = MillisSince(t0);
    return run;
  }

  const bool is_pak = options.mode == PipelineMode::kPak;
  const int fanout = options.fanout.value_or(is_pak ? 2 : config.fanout);
  const bool consistent = options.consistent.value_or(!is_pak);
  const bool smoothing = options.smoothing.value_or(!is_pak);
  int s = 0;
  if (smoothing) {
    s = options.smoothed_levels.value_or(
        OptimizeSmoothedLevels(theta, eps, config.range_limit, fanout));
  }
  const HierarchyPlan plan = PlanHierarchy(fanout, config.range_limit, eps, s);
  run.plan = plan;
  run.smoothed = s;
  run.node_noise_scale = plan.NodeNoiseScale(theta);
  for (int level = 0; level < plan.active_levels; ++level) {
    run.ledger.push_back({"perturber:level" + std::to_string(s + level + 1),
                          plan.level_epsilon, "sequential", stream_scope});
  }

  if (options.noiseless) {
    // Zero noise: the published stream is the truncated input.
    for (double v : rest) run.published.push_back(Truncate(v, theta));
    run.publish_ms = MillisSince(t0);
    return run;
  }

  RandomSource rng(options.seed, kPerturberStream);
  if (!consistent) {
    if (s != 0) throw ConfigError("smoothing requires the consistent perturber");
    // Without consistency the leaves alone are a poor range answer; keep the
    // full hierarchy and answer from its canonical decomposition.
    std::vector<double> truncated;
    truncated.reserve(rest.size());
    for (double v : rest) truncated.push_back(Truncate(v, theta));
    auto release = std::make_shared<HierarchyRelease>(plan, theta, truncated,
                                                      rng, false);
    run.published = release->LeafStream();
    run.hierarchy = std::move(release);
    run.publish_ms = MillisSince(t0);
    return run;
  }

  StreamPerturber perturber(plan, theta, rng, true);
  if (!smoothing) {
    for (double v : rest) {
      if (auto e = perturber.Ingest(Truncate(v, theta))) {
        run.published.push_back(e->value);
      }
    }
  } else {
    Smoother smoother(options.smoother, plan.group_size, theta);
    std::optional<double> pending;
    for (double v : rest) {
      run.published.push_back(smoother.Next(pending));
      auto e = perturber.Ingest(Truncate(v, theta));
      pending = e ? std::optional<double>(e->value) : std::nullopt;
    }
  }
  run.publish_ms = MillisSince(t0);
  return run;
}

}  // namespace streamdp
