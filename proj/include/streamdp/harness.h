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

#ifndef STREAMDP_HARNESS_H_
#define STREAMDP_HARNESS_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace streamdp {

struct DatasetProfile {
  size_t n = 0;
  double max = 0.0;
  double p85 = 0.0;
  double p95 = 0.0;
  double p995 = 0.0;
  double mean = 0.0;
};

// Nearest-rank percentile (p in percent) of an ascending sequence.
double Percentile(std::span<const double> sorted, double p);
DatasetProfile ProfileStream(std::span<const double> values);

struct LoadOptions {
  int column = -1;  // -1: one value per line; otherwise 0-based CSV column
  char delimiter = ',';
  bool header = false;
};

struct LoadedStream {
  std::vector<double> values;
  DatasetProfile profile;
};

// Parses readings in order. Throws DataError naming the line for
// non-numeric or negative rows and for empty input.
std::vector<double> ParseStream(std::istream& in, const LoadOptions& options);
LoadedStream LoadStream(const std::string& path, const LoadOptions& options);

struct SyntheticSpec {
  enum class Kind { kConstant, kUniform, kHeavyTail };
  Kind kind = Kind::kConstant;
  double a = 0.0;  // constant value | uniform lo | heavy-tail body mass
  double b = 0.0;  // uniform hi | body max
  double c = 0.0;  // tail max

  // "constant(5)", "uniform(0,100)", "heavy_tail(0.995,100,2000)".
  static SyntheticSpec Parse(const std::string& text);
  std::string ToString() const;
};

// Deterministic for a given (spec, n, seed).
std::vector<double> GenSynthetic(const SyntheticSpec& spec, size_t n,
                                 uint64_t seed);

enum class QueryMode {
  kUniformLength,     // length uniform in [1, min(r, n)], then start
  kUniformEndpoints,  // two uniform indices inside a random r-window
};

std::string ToString(QueryMode mode);
QueryMode QueryModeFromString(const std::string& name);

struct RangeQuery {
  uint64_t first;  // 1-based, inclusive
  uint64_t last;
};

struct QueryWorkload {
  std::vector<RangeQuery> queries;
  uint64_t range_limit = 0;
  uint64_t seed = 0;
  QueryMode mode = QueryMode::kUniformLength;
};

QueryWorkload GenQueries(uint64_t n, uint64_t r, size_t count, uint64_t seed,
                         QueryMode mode = QueryMode::kUniformLength);

struct MseReport {
  std::vector<double> squared_errors;
  double mse = 0.0;
};

using RangeAnswer = std::function<double(uint64_t first, uint64_t last)>;

// Mean squared error of range sums over the workload; streams are aligned
// and indexed from 1.
MseReport Evaluate(std::span<const double> truth,
                   std::span<const double> published,
                   const QueryWorkload& workload);
MseReport Evaluate(std::span<const double> truth, const RangeAnswer& answer,
                   const QueryWorkload& workload);

struct RepetitionSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  size_t count = 0;
};

RepetitionSummary Summarize(std::span<const double> values);

}  // namespace streamdp

#endif  // STREAMDP_HARNESS_H_
