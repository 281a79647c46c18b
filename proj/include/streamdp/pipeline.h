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

#ifndef STREAMDP_PIPELINE_H_
#define STREAMDP_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamdp/hierarchy.h"
#include "streamdp/ldp.h"
#include "streamdp/smoother.h"
#include "streamdp/threshold.h"

namespace streamdp {

enum class PipelineMode { kTops, kTopl, kPak };

std::string ToString(PipelineMode mode);
PipelineMode PipelineModeFromString(const std::string& name);

struct PipelineOptions {
  PipelineMode mode = PipelineMode::kTops;
  StreamConfig stream;
  SmootherOptions smoother;
  uint64_t seed = 0;

  // Threshold stage. Unset fields take the mode's defaults: EM-E for ToPS,
  // S-PAK for PAK, SW-W for ToPL; budget equal to stream.epsilon.
  std::optional<ThresholdMethod> threshold_method;
  std::optional<double> fixed_theta;
  std::optional<double> threshold_epsilon;
  PakParams pak;
  double sp_percentile = 99.5;
  // Splits epsilon in half between threshold and perturber instead of
  // relying on parallel composition over disjoint readings.
  bool sequential_split = false;

  // Perturber shape. Unset fields take the mode's defaults: ToPS uses the
  // configured fan-out with consistency and the smoother; PAK uses a binary
  // tree without either and answers queries from internal nodes.
  std::optional<int> fanout;
  std::optional<bool> consistent;
  std::optional<bool> smoothing;
  std::optional<int> smoothed_levels;
  // Test hook: publish true aggregates with no noise.
  bool noiseless = false;

  SwEmOptions sw;
};

struct LedgerEntry {
  std::string stage;
  double epsilon;
  std::string composition;  // "parallel" or "sequential"
  std::string scope;        // readings covered
};

struct PipelineRun {
  PipelineMode mode = PipelineMode::kTops;
  ThresholdDecision threshold;
  size_t holdout = 0;               // readings consumed by the threshold stage
  std::vector<double> published;    // one value per reading after the holdout
  std::optional<HierarchyPlan> plan;
  int smoothed = 0;
  double node_noise_scale = 0.0;
  std::vector<LedgerEntry> ledger;
  std::vector<std::string> warnings;
  double threshold_ms = 0.0;
  double publish_ms = 0.0;
  // Present when queries are answered from the full hierarchy.
  std::shared_ptr<const HierarchyRelease> hierarchy;

  struct Answer {
    double value;
    bool partial;  // the range overlapped the unpublished holdout
  };
  // Range sum over stream indices [first, last] (1-based). Holdout indices
  // contribute nothing. Throws InvalidParameterError if the range exceeds r.
  Answer AnswerRangeQuery(uint64_t first, uint64_t last) const;

  uint64_t range_limit = 0;
};

// Runs the whole pipeline over a finite stream. Readings must lie in [0, B];
// a violation throws DataError naming the 1-based index.
PipelineRun RunPipeline(std::span<const double> stream,
                        const PipelineOptions& options);

// Threshold stage only, over the first min(m, n) readings.
ThresholdDecision SelectThreshold(std::span<const double> stream,
                                  const PipelineOptions& options);

}  // namespace streamdp

#endif  // STREAMDP_PIPELINE_H_
