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

#ifndef STREAMDP_IO_H_
#define STREAMDP_IO_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "streamdp/harness.h"
#include "streamdp/hierarchy.h"
#include "streamdp/ldp.h"
#include "streamdp/pipeline.h"
#include "streamdp/threshold.h"

namespace streamdp {

// Shortest round-trip decimal form ("%.17g").
std::string FormatDouble(double value);

// Pipeline configuration document:
// {mode, B, r, b, epsilon, m, c, smoother:{kind, w, alpha}, seed,
//  input_path, output_path, ...}. Unknown keys are rejected.
struct RunConfig {
  PipelineOptions options;
  std::string input_path;
  std::string output_path;
  std::string manifest_path;  // defaults to output_path + ".manifest.json"
  std::string trace_path;     // threshold trace CSV, optional
  LoadOptions load;
};

RunConfig RunConfigFromJson(const nlohmann::json& doc);
RunConfig RunConfigFromString(const std::string& text);

// {theta, method, epsilon, m, trace_path} plus diagnostics when present.
nlohmann::json ThresholdJson(const ThresholdDecision& decision,
                             const std::string& trace_path = "");
void WriteTraceCsv(const ThresholdDecision& decision, std::ostream& out);

nlohmann::json ManifestJson(const PipelineRun& run,
                            const PipelineOptions& options);

// (index, value) rows for every reading; holdout rows carry an empty value.
void WritePublishedCsv(const PipelineRun& run, std::ostream& out);

struct PublishedStream {
  size_t holdout = 0;            // leading rows without a value
  std::vector<double> values;    // the remaining rows in index order
};
PublishedStream ReadPublishedCsv(std::istream& in);

// Perturber sink: (chunk_index, group_index, value).
void WriteEmissionsCsv(const std::vector<Emission>& emissions, std::ostream& out);
nlohmann::json NoiseTreeJson(const NoiseTree& tree);

// Local pipeline artifacts: (user_id, phase, report) and (bin_value, frequency).
struct ClientReport {
  uint64_t user_id;
  std::string phase;
  double report;
};
void WriteReportsCsv(const std::vector<ClientReport>& reports, std::ostream& out);
void WriteDensityCsv(const DensityEstimate& estimate, std::ostream& out);

nlohmann::json ProfileJson(const DatasetProfile& profile);

}  // namespace streamdp

#endif  // STREAMDP_IO_H_
