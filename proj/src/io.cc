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

#include "streamdp/io.h"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "streamdp/errors.h"

namespace streamdp {

using nlohmann::json;

std::string FormatDouble(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

template <typename T>
T Get(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> GetOptional(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void RejectUnknown(const json& doc, const std::set<std::string>& known,
                   const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

RunConfig RunConfigFromJson(const json& doc) {
  RejectUnknown(doc,
                {"mode", "B", "r", "b", "epsilon", "m", "c", "smoother", "seed",
                 "input_path", "output_path", "manifest_path", "trace_path",
                 "column", "header", "threshold_method", "threshold_epsilon",
                 "fixed_theta", "grid_stride", "monotone", "sequential_split",
                 "consistent", "smoothing", "smoothed_levels", "pak",
                 "sp_percentile", "sw_max_iterations"},
                "run config");
  RunConfig cfg;
  PipelineOptions& o = cfg.options;
  o.mode = PipelineModeFromString(Get<std::string>(doc, "mode", "ToPS"));
  StreamConfig& s = o.stream;
  s.upper_bound = Get<double>(doc, "B", s.upper_bound);
  s.range_limit = Get<uint64_t>(doc, "r", s.range_limit);
  s.fanout = Get<int>(doc, "b", s.fanout);
  s.epsilon = Get<double>(doc, "epsilon", s.epsilon);
  s.holdout = Get<size_t>(doc, "m", s.holdout);
  s.bias_scale = Get<double>(doc, "c", s.bias_scale);
  s.grid_stride = Get<double>(doc, "grid_stride", s.grid_stride);
  s.monotone_em = Get<bool>(doc, "monotone", s.monotone_em);
  try {
    s.Validate();
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what());
  }
  if (auto sm = doc.find("smoother"); sm != doc.end() && !sm->is_null()) {
    RejectUnknown(*sm, {"kind", "w", "alpha"}, "smoother");
    o.smoother.kind = SmootherKindFromString(Get<std::string>(*sm, "kind", "recent"));
    o.smoother.window = Get<int>(*sm, "w", o.smoother.window);
    o.smoother.alpha = Get<double>(*sm, "alpha", o.smoother.alpha);
    if (o.smoother.window < 1 || !(o.smoother.alpha >= 0 && o.smoother.alpha <= 1)) {
      throw ConfigError("smoother needs w >= 1 and alpha in [0, 1]");
    }
  }
  if (!doc.contains("seed")) throw ConfigError("config key 'seed' is required");
  o.seed = Get<uint64_t>(doc, "seed", 0);
  if (auto m = GetOptional<std::string>(doc, "threshold_method")) {
    o.threshold_method = ThresholdMethodFromString(*m);
  }
  o.threshold_epsilon = GetOptional<double>(doc, "threshold_epsilon");
  o.fixed_theta = GetOptional<double>(doc, "fixed_theta");
  o.sequential_split = Get<bool>(doc, "sequential_split", false);
  o.consistent = GetOptional<bool>(doc, "consistent");
  o.smoothing = GetOptional<bool>(doc, "smoothing");
  o.smoothed_levels = GetOptional<int>(doc, "smoothed_levels");
  o.sp_percentile = Get<double>(doc, "sp_percentile", o.sp_percentile);
  o.sw.max_iterations = Get<size_t>(doc, "sw_max_iterations", o.sw.max_iterations);
  if (auto pak = doc.find("pak"); pak != doc.end() && !pak->is_null()) {
    RejectUnknown(*pak, {"percentile", "beta", "delta"}, "pak");
    o.pak.percentile = Get<double>(*pak, "percentile", o.pak.percentile);
    o.pak.beta = Get<double>(*pak, "beta", o.pak.beta);
    o.pak.delta = GetOptional<double>(*pak, "delta");
  }
  cfg.input_path = Get<std::string>(doc, "input_path", "");
  cfg.output_path = Get<std::string>(doc, "output_path", "");
  cfg.manifest_path = Get<std::string>(doc, "manifest_path", "");
  if (cfg.manifest_path.empty() && !cfg.output_path.empty()) {
    cfg.manifest_path = cfg.output_path + ".manifest.json";
  }
  cfg.trace_path = Get<std::string>(doc, "trace_path", "");
  cfg.load.column = Get<int>(doc, "column", -1);
  cfg.load.header = Get<bool>(doc, "header", false);
  return cfg;
}

RunConfig RunConfigFromString(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return RunConfigFromJson(doc);
}

json ThresholdJson(const ThresholdDecision& d, const std::string& trace_path) {
  json out = {{"theta", d.theta},
              {"method", ToString(d.method)},
              {"epsilon", d.epsilon},
              {"m", d.holdout},
              {"trace_path", trace_path.empty() ? json(nullptr) : json(trace_path)}};
  if (d.quantile) out["quantile"] = *d.quantile;
  if (d.smooth_sensitivity) out["smooth_sensitivity"] = *d.smooth_sensitivity;
  if (d.noise) out["noise"] = *d.noise;
  if (d.kappa) out["kappa"] = *d.kappa;
  return out;
}

void WriteTraceCsv(const ThresholdDecision& d, std::ostream& out) {
  out << "candidate,score\n";
  for (size_t i = 0; i < d.trace.size() && i < d.candidates.size(); ++i) {
    out << FormatDouble(d.candidates[i]) << ',' << FormatDouble(d.trace[i]) << '\n';
  }
}

json ManifestJson(const PipelineRun& run, const PipelineOptions& options) {
  json ledger = json::array();
  for (const LedgerEntry& e : run.ledger) {
    ledger.push_back({{"stage", e.stage},
                      {"epsilon", e.epsilon},
                      {"composition", e.composition},
                      {"scope", e.scope}});
  }
  json out = {{"mode", ToString(run.mode)},
              {"seed", options.seed},
              {"theta", run.threshold.theta},
              {"threshold", ThresholdJson(run.threshold)},
              {"s", run.smoothed},
              {"holdout", run.holdout},
              {"published", run.published.size()},
              {"ledger", ledger},
              {"warnings", run.warnings},
              {"timings_ms",
               {{"threshold", run.threshold_ms}, {"publish", run.publish_ms}}}};
  if (run.plan) {
    out["plan"] = {{"b", run.plan->fanout},
                   {"r", run.plan->chunk_size},
                   {"h", run.plan->height},
                   {"active_levels", run.plan->active_levels},
                   {"level_epsilon", run.plan->level_epsilon},
                   {"group_size", run.plan->group_size},
                   {"node_noise_scale", run.node_noise_scale},
                   {"queries_from", run.hierarchy ? "hierarchy" : "leaves"}};
  }
  if (run.mode != PipelineMode::kTopl) {
    out["smoother"] = {{"kind", ToString(options.smoother.kind)},
                       {"w", options.smoother.window},
                       {"alpha", options.smoother.alpha}};
  }
  return out;
}

void WritePublishedCsv(const PipelineRun& run, std::ostream& out) {
  out << "index,value\n";
  for (size_t i = 1; i <= run.holdout; ++i) out << i << ",\n";
  for (size_t k = 0; k < run.published.size(); ++k) {
    out << run.holdout + k + 1 << ',' << FormatDouble(run.published[k]) << '\n';
  }
}

PublishedStream ReadPublishedCsv(std::istream& in) {
  PublishedStream out;
  std::string line;
  size_t line_no = 0;
  size_t expected = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("index", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("line " + std::to_string(line_no) + ": expected index,value");
    }
    size_t index = 0;
    const std::string idx = line.substr(0, comma);
    auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (ec != std::errc() || p != idx.data() + idx.size() || index != expected) {
      throw DataError("line " + std::to_string(line_no) + ": bad or out-of-order index");
    }
    ++expected;
    const std::string value = line.substr(comma + 1);
    if (value.empty()) {
      if (!out.values.empty()) {
        throw DataError("line " + std::to_string(line_no) + ": gap after published rows");
      }
      ++out.holdout;
      continue;
    }
    double v = 0.0;
    auto [q, ec2] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec2 != std::errc() || q != value.data() + value.size()) {
      throw DataError("line " + std::to_string(line_no) + ": non-numeric value");
    }
    out.values.push_back(v);
  }
  return out;
}

void WriteEmissionsCsv(const std::vector<Emission>& emissions, std::ostream& out) {
  out << "chunk_index,group_index,value\n";
  for (const Emission& e : emissions) {
    out << e.chunk << ',' << e.group << ',' << FormatDouble(e.value) << '\n';
  }
}

json NoiseTreeJson(const NoiseTree& tree) {
  json levels = json::array();
  for (int l = 0; l < tree.levels(); ++l) {
    auto values = tree.Level(l);
    levels.push_back(std::vector<double>(values.begin(), values.end()));
  }
  return {{"fanout", tree.fanout()},
          {"consistent", tree.consistent()},
          {"levels", levels}};
}

void WriteReportsCsv(const std::vector<ClientReport>& reports, std::ostream& out) {
  out << "user_id,phase,report\n";
  for (const ClientReport& r : reports) {
    out << r.user_id << ',' << r.phase << ',' << FormatDouble(r.report) << '\n';
  }
}

void WriteDensityCsv(const DensityEstimate& estimate, std::ostream& out) {
  out << "bin_value,frequency\n";
  for (size_t i = 0; i < estimate.bin_values.size(); ++i) {
    out << FormatDouble(estimate.bin_values[i]) << ','
        << FormatDouble(estimate.frequency[i]) << '\n';
  }
}

json ProfileJson(const DatasetProfile& p) {
  return {{"n", p.n},     {"max", p.max},   {"p85", p.p85},
          {"p95", p.p95}, {"p99.5", p.p995}, {"mean", p.mean}};
}

}  // namespace streamdp
