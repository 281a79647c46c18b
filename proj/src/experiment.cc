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

#include "streamdp/experiment.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>
#include <set>
#include <thread>

#include "streamdp/errors.h"
#include "streamdp/io.h"
#include "streamdp/random.h"

namespace streamdp {
namespace {

constexpr uint64_t kWorkloadStream = 0x717e;
constexpr uint64_t kCellStream = 0xce11;

const std::vector<std::string>& KnownMethods() {
  static const std::vector<std::string> kMethods = {
      "H2",   "H16", "H16c", "H16c_hat", "EM-E", "S-PAK",
      "S-P",  "ToPS", "PAK", "ToPL",     "Base"};
  return kMethods;
}

uint64_t Fnv1a(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const size_t k = values.size() / 2;
  return values.size() % 2 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

double FixedTheta(const ExperimentConfig& config, std::span<const double> data) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double theta = Percentile(sorted, config.fixed_percentile);
  // A zero percentile would leave nothing to publish; fall back to 1.
  return theta > 0.0 ? theta : 1.0;
}

template <typename T>
T Field(const nlohmann::json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

bool IsKnownMethod(const std::string& method) {
  const auto& known = KnownMethods();
  return std::find(known.begin(), known.end(), method) != known.end();
}

void ExperimentConfig::Validate() const {
  try {
    stream.Validate();
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what());
  }
  if (methods.empty()) throw ConfigError("experiment needs at least one method");
  for (const std::string& m : methods) {
    if (!IsKnownMethod(m)) throw ConfigError("unknown method: " + m);
  }
  if (epsilons.empty()) throw ConfigError("experiment needs at least one epsilon");
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilon must be > 0");
  }
  if (perturber_epsilon && !(*perturber_epsilon > 0.0)) {
    throw ConfigError("perturber_epsilon must be > 0");
  }
  if (repetitions == 0) throw ConfigError("repetitions must be >= 1");
  if (queries == 0) throw ConfigError("queries must be >= 1");
  if (!synthetic && input_path.empty()) {
    throw ConfigError("experiment needs synthetic data or an input path");
  }
  if (synthetic && n == 0) throw ConfigError("synthetic data needs n >= 1");
  if (!(fixed_percentile > 0.0 && fixed_percentile <= 100.0)) {
    throw ConfigError("fixed_percentile must lie in (0, 100]");
  }
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& doc) {
  static const std::set<std::string> kKeys = {
      "data", "B", "r", "b", "m", "c", "grid_stride", "smoother", "methods",
      "epsilons", "repetitions", "queries", "query_mode", "seed", "threads",
      "fixed_percentile", "truncate_truth", "perturber_epsilon", "output_path"};
  if (!doc.is_object()) throw ConfigError("experiment config must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!kKeys.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in experiment config");
    }
  }
  ExperimentConfig cfg;
  const auto data = doc.find("data");
  if (data == doc.end() || !data->is_object()) {
    throw ConfigError("experiment config needs a 'data' object");
  }
  for (auto it = data->begin(); it != data->end(); ++it) {
    static const std::set<std::string> kDataKeys = {"synthetic", "n", "seed",
                                                    "path", "column", "header"};
    if (!kDataKeys.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in data");
    }
  }
  if (auto spec = Field<std::string>(*data, "synthetic", ""); !spec.empty()) {
    try {
      cfg.synthetic = SyntheticSpec::Parse(spec);
    } catch (const InvalidParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.n = Field<size_t>(*data, "n", 0);
  cfg.data_seed = Field<uint64_t>(*data, "seed", 0);
  cfg.input_path = Field<std::string>(*data, "path", "");
  cfg.load.column = Field<int>(*data, "column", -1);
  cfg.load.header = Field<bool>(*data, "header", false);

  StreamConfig& s = cfg.stream;
  s.upper_bound = Field<double>(doc, "B", s.upper_bound);
  s.range_limit = Field<uint64_t>(doc, "r", s.range_limit);
  s.fanout = Field<int>(doc, "b", s.fanout);
  s.holdout = Field<size_t>(doc, "m", s.holdout);
  s.bias_scale = Field<double>(doc, "c", s.bias_scale);
  s.grid_stride = Field<double>(doc, "grid_stride", s.grid_stride);
  if (auto sm = doc.find("smoother"); sm != doc.end() && !sm->is_null()) {
    cfg.smoother.kind =
        SmootherKindFromString(Field<std::string>(*sm, "kind", "recent"));
    cfg.smoother.window = Field<int>(*sm, "w", cfg.smoother.window);
    cfg.smoother.alpha = Field<double>(*sm, "alpha", cfg.smoother.alpha);
  }
  cfg.methods = Field<std::vector<std::string>>(doc, "methods", {});
  cfg.epsilons = Field<std::vector<double>>(doc, "epsilons", {});
  cfg.repetitions = Field<size_t>(doc, "repetitions", cfg.repetitions);
  cfg.queries = Field<size_t>(doc, "queries", cfg.queries);
  cfg.query_mode =
      QueryModeFromString(Field<std::string>(doc, "query_mode", "uniform_length"));
  if (!doc.contains("seed")) throw ConfigError("config key 'seed' is required");
  cfg.seed = Field<uint64_t>(doc, "seed", 0);
  cfg.threads = Field<unsigned>(doc, "threads", 0);
  cfg.fixed_percentile = Field<double>(doc, "fixed_percentile", cfg.fixed_percentile);
  cfg.truncate_truth = Field<bool>(doc, "truncate_truth", false);
  if (doc.contains("perturber_epsilon") && !doc["perturber_epsilon"].is_null()) {
    cfg.perturber_epsilon = Field<double>(doc, "perturber_epsilon", 0.0);
  }
  cfg.output_path = Field<std::string>(doc, "output_path", "");
  cfg.Validate();
  return cfg;
}

std::vector<double> ExperimentData(const ExperimentConfig& config) {
  if (config.synthetic) {
    return GenSynthetic(*config.synthetic, config.n, config.data_seed);
  }
  return LoadStream(config.input_path, config.load).values;
}

QueryWorkload ExperimentWorkload(const ExperimentConfig& config, uint64_t region,
                                 size_t rep) {
  const uint64_t seed = RandomSource(config.seed, kWorkloadStream).Split(rep).NextU64();
  return GenQueries(region, config.stream.range_limit, config.queries, seed,
                    config.query_mode);
}

CellResult RunCell(const ExperimentConfig& config, std::span<const double> data,
                   const std::string& method, double epsilon, size_t rep) {
  const size_t m = std::min(config.stream.holdout, data.size());
  std::span<const double> region = data.subspan(m);
  if (region.empty()) throw DataError("no readings after the holdout");

  std::vector<double> truth(region.begin(), region.end());
  const double fixed = FixedTheta(config, data);
  if (config.truncate_truth) {
    for (double& v : truth) v = Truncate(v, fixed);
  }
  const QueryWorkload workload = ExperimentWorkload(config, region.size(), rep);

  if (method == "Base") {
    const std::vector<double> zeros(region.size(), 0.0);
    return {Evaluate(truth, zeros, workload).mse, 0.0};
  }

  uint64_t eps_bits = 0;
  std::memcpy(&eps_bits, &epsilon, sizeof(eps_bits));
  PipelineOptions o;
  o.stream = config.stream;
  o.stream.epsilon = config.perturber_epsilon.value_or(epsilon);
  o.smoother = config.smoother;
  o.seed = RandomSource(config.seed, kCellStream ^ Fnv1a(method) ^ eps_bits)
               .Split(rep)
               .NextU64();
  if (config.perturber_epsilon) o.threshold_epsilon = epsilon;

  const bool hierarchy_variant =
      method == "H2" || method == "H16" || method == "H16c" || method == "H16c_hat";
  if (hierarchy_variant) {
    o.fixed_theta = fixed;
    o.fanout = method == "H2" ? 2 : 16;
    o.consistent = method == "H16c" || method == "H16c_hat";
    o.smoothing = method == "H16c_hat";
  } else if (method == "EM-E") {
    o.threshold_method = ThresholdMethod::kEmE;
  } else if (method == "S-PAK") {
    o.threshold_method = ThresholdMethod::kSPak;
  } else if (method == "S-P") {
    o.threshold_method = ThresholdMethod::kSP;
  } else if (method == "PAK") {
    o.mode = PipelineMode::kPak;
  } else if (method == "ToPL") {
    o.mode = PipelineMode::kTopl;
  } else if (method != "ToPS") {
    throw ConfigError("unknown method: " + method);
  }

  const PipelineRun run = RunPipeline(data, o);
  const RangeAnswer answer = [&run, m](uint64_t first, uint64_t last) {
    return run.AnswerRangeQuery(first + m, last + m).value;
  };
  return {Evaluate(truth, answer, workload).mse, run.threshold.theta};
}

std::vector<ExperimentRow> RunExperiment(const ExperimentConfig& config,
                                         std::span<const double> data) {
  config.Validate();
  const size_t n_methods = config.methods.size();
  const size_t n_eps = config.epsilons.size();
  const size_t reps = config.repetitions;
  const size_t cells = n_methods * n_eps * reps;

  struct Slot {
    bool ok = false;
    CellResult result{};
    std::string error;
  };
  std::vector<Slot> slots(cells);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < cells; k = next++) {
      const size_t rep = k % reps;
      const size_t e = (k / reps) % n_eps;
      const size_t mi = k / (reps * n_eps);
      try {
        slots[k].result =
            RunCell(config, data, config.methods[mi], config.epsilons[e], rep);
        slots[k].ok = true;
      } catch (const std::exception& ex) {
        slots[k].error = ex.what();
      }
    }
  };
  unsigned threads = config.threads ? config.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, cells));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<ExperimentRow> rows;
  for (size_t mi = 0; mi < n_methods; ++mi) {
    for (size_t e = 0; e < n_eps; ++e) {
      ExperimentRow row;
      row.method = config.methods[mi];
      row.epsilon = config.epsilons[e];
      std::vector<double> thetas;
      for (size_t rep = 0; rep < reps; ++rep) {
        const Slot& slot = slots[(mi * n_eps + e) * reps + rep];
        if (slot.ok) {
          row.mses.push_back(slot.result.mse);
          thetas.push_back(slot.result.theta);
        } else {
          ++row.failures;
          if (row.first_error.empty()) row.first_error = slot.error;
        }
      }
      const RepetitionSummary summary = Summarize(row.mses);
      row.repetitions = summary.count;
      row.mse_mean = row.mses.empty() ? std::nan("") : summary.mean;
      row.mse_std = row.mses.empty() ? std::nan("") : summary.stddev;
      row.mse_median = Median(row.mses);
      row.theta_median = Median(thetas);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void WriteExperimentCsv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  out << "method,epsilon,mse_mean,mse_std,mse_median,theta_median,repetitions,"
         "failures\n";
  for (const ExperimentRow& r : rows) {
    out << r.method << ',' << FormatDouble(r.epsilon) << ','
        << FormatDouble(r.mse_mean) << ',' << FormatDouble(r.mse_std) << ','
        << FormatDouble(r.mse_median) << ',' << FormatDouble(r.theta_median) << ','
        << r.repetitions << ',' << r.failures << '\n';
  }
}

}  // namespace streamdp
