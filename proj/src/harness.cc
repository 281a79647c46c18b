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

#include "streamdp/harness.h"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "streamdp/errors.h"
#include "streamdp/mechanisms.h"
#include "streamdp/random.h"

namespace streamdp {

double Percentile(std::span<const double> sorted, double p) {
  return sorted[QuantileRank(p, sorted.size()) - 1];
}

DatasetProfile ProfileStream(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot profile an empty stream");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  DatasetProfile profile;
  profile.n = sorted.size();
  profile.max = sorted.back();
  profile.p85 = Percentile(sorted, 85.0);
  profile.p95 = Percentile(sorted, 95.0);
  profile.p995 = Percentile(sorted, 99.5);
  profile.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                 static_cast<double>(values.size());
  return profile;
}

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseNumber(const std::string& field, size_t line) {
  const std::string text = Trim(field);
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line) + ": non-numeric value '" +
                    text + "'");
  }
  if (value < 0.0) {
    throw DataError("line " + std::to_string(line) + ": negative value");
  }
  return value;
}

}  // namespace

std::vector<double> ParseStream(std::istream& in, const LoadOptions& options) {
  std::vector<double> values;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.header && line_no == 1) continue;
    if (Trim(line).empty()) continue;
    if (options.column < 0) {
      values.push_back(ParseNumber(line, line_no));
      continue;
    }
    std::stringstream row(line);
    std::string field;
    int col = 0;
    bool found = false;
    while (std::getline(row, field, options.delimiter)) {
      if (col++ == options.column) {
        values.push_back(ParseNumber(field, line_no));
        found = true;
        break;
      }
    }
    if (!found) {
      throw DataError("line " + std::to_string(line_no) + ": missing column " +
                      std::to_string(options.column));
    }
  }
  if (values.empty()) throw DataError("stream contains no readings");
  return values;
}

LoadedStream LoadStream(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read stream file: " + path);
  LoadedStream out;
  out.values = ParseStream(in, options);
  out.profile = ProfileStream(out.values);
  return out;
}

SyntheticSpec SyntheticSpec::Parse(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ConfigError("malformed synthetic spec: " + text);
  }
  const std::string name = Trim(text.substr(0, open));
  std::vector<double> args;
  std::stringstream list(text.substr(open + 1, close - open - 1));
  std::string field;
  while (std::getline(list, field, ',')) {
    try {
      size_t used = 0;
      const std::string t = Trim(field);
      args.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("malformed synthetic argument: " + field);
    }
  }
  SyntheticSpec spec;
  if (name == "constant" && args.size() == 1) {
    spec.kind = Kind::kConstant;
    spec.a = args[0];
    if (spec.a < 0) throw ConfigError("constant must be >= 0");
  } else if (name == "uniform" && args.size() == 2) {
    spec.kind = Kind::kUniform;
    spec.a = args[0];
    spec.b = args[1];
    if (!(spec.a >= 0 && spec.b >= spec.a)) {
      throw ConfigError("uniform(a,b) needs 0 <= a <= b");
    }
  } else if (name == "heavy_tail" && args.size() == 3) {
    spec.kind = Kind::kHeavyTail;
    spec.a = args[0];
    spec.b = args[1];
    spec.c = args[2];
    if (!(spec.a >= 0 && spec.a <= 1 && spec.b > 0 && spec.c > spec.b)) {
      throw ConfigError(
          "heavy_tail(mass,body_max,tail_max) needs mass in [0,1] and "
          "0 < body_max < tail_max");
    }
  } else {
    throw ConfigError("unknown synthetic spec: " + text);
  }
  return spec;
}

std::string SyntheticSpec::ToString() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::kConstant: out << "constant(" << a << ")"; break;
    case Kind::kUniform: out << "uniform(" << a << "," << b << ")"; break;
    case Kind::kHeavyTail:
      out << "heavy_tail(" << a << "," << b << "," << c << ")";
      break;
  }
  return out.str();
}

std::vector<double> GenSynthetic(const SyntheticSpec& spec, size_t n,
                                 uint64_t seed) {
  RandomSource rng(seed, 0x5157);
  std::vector<double> out(n);
  for (double& v : out) {
    switch (spec.kind) {
      case SyntheticSpec::Kind::kConstant:
        v = spec.a;
        break;
      case SyntheticSpec::Kind::kUniform:
        v = rng.Uniform(spec.a, spec.b);
        break;
      case SyntheticSpec::Kind::kHeavyTail:
        if (rng.Uniform() < spec.a) {
          v = rng.Uniform(0.0, spec.b);
        } else {
          // (body_max, tail_max]
          v = spec.c - rng.Uniform() * (spec.c - spec.b);
        }
        break;
    }
  }
  return out;
}

std::string ToString(QueryMode mode) {
  return mode == QueryMode::kUniformLength ? "uniform_length"
                                           : "uniform_endpoints";
}

QueryMode QueryModeFromString(const std::string& name) {
  if (name == "uniform_length") return QueryMode::kUniformLength;
  if (name == "uniform_endpoints") return QueryMode::kUniformEndpoints;
  throw ConfigError("unknown query mode: " + name);
}

QueryWorkload GenQueries(uint64_t n, uint64_t r, size_t count, uint64_t seed,
                         QueryMode mode) {
  if (n < 1) throw InvalidParameterError("query workload needs n >= 1");
  if (r < 1) throw InvalidParameterError("query workload needs r >= 1");
  RandomSource rng(seed, 0x9e77);
  QueryWorkload workload;
  workload.range_limit = r;
  workload.seed = seed;
  workload.mode = mode;
  workload.queries.reserve(count);
  const uint64_t span = std::min(r, n);
  for (size_t q = 0; q < count; ++q) {
    if (mode == QueryMode::kUniformLength) {
      const uint64_t length = 1 + rng.UniformInt(span);
      const uint64_t first = 1 + rng.UniformInt(n - length + 1);
      workload.queries.push_back({first, first + length - 1});
    } else {
      const uint64_t window = 1 + rng.UniformInt(n - span + 1);
      uint64_t a = window + rng.UniformInt(span);
      uint64_t b = window + rng.UniformInt(span);
      if (a > b) std::swap(a, b);
      workload.queries.push_back({a, b});
    }
  }
  return workload;
}

MseReport Evaluate(std::span<const double> truth, const RangeAnswer& answer,
                   const QueryWorkload& workload) {
  MseReport report;
  report.squared_errors.reserve(workload.queries.size());
  double total = 0.0;
  for (const RangeQuery& q : workload.queries) {
    if (q.first < 1 || q.first > q.last || q.last > truth.size()) {
      throw DataError("query outside the evaluated stream");
    }
    double exact = 0.0;
    for (uint64_t k = q.first; k <= q.last; ++k) exact += truth[k - 1];
    const double err = answer(q.first, q.last) - exact;
    report.squared_errors.push_back(err * err);
    total += err * err;
  }
  report.mse = workload.queries.empty()
                   ? 0.0
                   : total / static_cast<double>(workload.queries.size());
  return report;
}

MseReport Evaluate(std::span<const double> truth,
                   std::span<const double> published,
                   const QueryWorkload& workload) {
  if (truth.size() != published.size()) {
    throw DataError("true and published streams are misaligned");
  }
  return Evaluate(
      truth,
      [&](uint64_t first, uint64_t last) {
        double sum = 0.0;
        for (uint64_t k = first; k <= last; ++k) sum += published[k - 1];
        return sum;
      },
      workload);
}

RepetitionSummary Summarize(std::span<const double> values) {
  RepetitionSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace streamdp
