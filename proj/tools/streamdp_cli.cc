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

// streamdp command-line front end. Talks to the library only through the
// C API.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "streamdp/streamdp.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CliError {
  int code;
  std::string message;
};

int ExitCodeFor(sdp_status status) {
  switch (status) {
    case SDP_OK: return kExitOk;
    case SDP_ERR_INVALID_ARGUMENT:
    case SDP_ERR_CONFIG: return kExitConfig;
    case SDP_ERR_DATA:
    case SDP_ERR_IO: return kExitData;
    default: return kExitInternal;
  }
}

void Check(sdp_status status) {
  if (status != SDP_OK) throw CliError{ExitCodeFor(status), sdp_last_error()};
}

std::string TakeString(char* text) {
  std::string out = text ? text : "";
  sdp_free_string(text);
  return out;
}

json ReadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CliError{kExitConfig, "cannot read config " + path};
  try {
    json doc = json::parse(in);
    if (!doc.is_object()) throw CliError{kExitConfig, "config must be an object"};
    return doc;
  } catch (const json::exception& e) {
    throw CliError{kExitConfig, "config " + path + ": " + e.what()};
  }
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw CliError{kExitData, "cannot write " + path};
}

struct StreamHandle {
  sdp_stream* ptr = nullptr;
  ~StreamHandle() { sdp_stream_free(ptr); }
};

struct RunHandle {
  sdp_run* ptr = nullptr;
  ~RunHandle() { sdp_run_free(ptr); }
};

// Pipeline flags; each one, when given, overrides the same key in the JSON
// config.
struct RunFlags {
  std::string config;
  std::optional<std::string> mode, input, output, manifest, trace;
  std::optional<std::string> smoother, threshold_method;
  std::optional<double> B, epsilon, c, alpha, fixed_theta, threshold_epsilon;
  std::optional<uint64_t> r, m, seed;
  std::optional<int> b, w, column, smoothed_levels;
  bool header = false;
  bool sequential_split = false;

  void Register(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--mode", mode, "ToPS, ToPL or PAK");
    app->add_option("--input", input, "input stream file (input_path)");
    app->add_option("--output", output, "published CSV (output_path)");
    app->add_option("--manifest", manifest, "run manifest JSON path");
    app->add_option("--trace", trace, "threshold trace CSV path");
    app->add_option("--B", B, "public upper bound on readings");
    app->add_option("--r", r, "maximal query range");
    app->add_option("--b", b, "hierarchy fan-out");
    app->add_option("--epsilon", epsilon, "privacy budget");
    app->add_option("--m", m, "holdout size");
    app->add_option("--c", c, "bias scale");
    app->add_option("--smoother", smoother,
                    "recent, mean, median, moving_average or exponential");
    app->add_option("--w", w, "moving average window");
    app->add_option("--alpha", alpha, "exponential smoothing factor");
    app->add_option("--threshold-method", threshold_method,
                    "EM-E, S-PAK, S-P, fixed or SW-W");
    app->add_option("--fixed-theta", fixed_theta, "use this threshold");
    app->add_option("--threshold-epsilon", threshold_epsilon,
                    "threshold stage budget");
    app->add_option("--smoothed-levels", smoothed_levels, "override s");
    app->add_option("--column", column, "0-based CSV column of the input");
    app->add_flag("--header", header, "input has a header row");
    app->add_flag("--sequential-split", sequential_split,
                  "split epsilon between threshold and perturber");
  }

  json Build() const {
    json doc = ReadConfig(config);
    auto set = [&doc](const char* key, const auto& value) {
      if (value) doc[key] = *value;
    };
    set("mode", mode);
    set("input_path", input);
    set("output_path", output);
    set("manifest_path", manifest);
    set("trace_path", trace);
    set("B", B);
    set("r", r);
    set("b", b);
    set("epsilon", epsilon);
    set("m", m);
    set("c", c);
    set("seed", seed);
    set("threshold_method", threshold_method);
    set("fixed_theta", fixed_theta);
    set("threshold_epsilon", threshold_epsilon);
    set("smoothed_levels", smoothed_levels);
    set("column", column);
    if (header) doc["header"] = true;
    if (sequential_split) doc["sequential_split"] = true;
    if (smoother || w || alpha) {
      json& sm = doc["smoother"];
      if (!sm.is_object()) sm = json::object();
      if (smoother) sm["kind"] = *smoother;
      if (w) sm["w"] = *w;
      if (alpha) sm["alpha"] = *alpha;
    }
    if (!doc.contains("seed")) doc["seed"] = 0;
    return doc;
  }
};

StreamHandle LoadInput(const json& doc) {
  const std::string path = doc.value("input_path", "");
  if (path.empty()) throw CliError{kExitConfig, "no input (--input or input_path)"};
  StreamHandle stream;
  Check(sdp_stream_load(path.c_str(), doc.value("column", -1),
                        doc.value("header", false) ? 1 : 0, &stream.ptr));
  return stream;
}

int CmdThreshold(const RunFlags& flags, const std::string& out_path) {
  const json doc = flags.Build();
  StreamHandle stream = LoadInput(doc);
  const std::string trace = doc.value("trace_path", "");
  char* decision = nullptr;
  Check(sdp_threshold(stream.ptr, doc.dump().c_str(),
                      trace.empty() ? nullptr : trace.c_str(), &decision));
  WriteText(out_path, TakeString(decision) + "\n");
  return kExitOk;
}

int CmdRun(const RunFlags& flags) {
  const json doc = flags.Build();
  StreamHandle stream = LoadInput(doc);
  const std::string output = doc.value("output_path", "");
  if (output.empty()) throw CliError{kExitConfig, "no output (--output or output_path)"};
  RunHandle run;
  Check(sdp_run_pipeline(stream.ptr, doc.dump().c_str(), &run.ptr));
  Check(sdp_run_write_csv(run.ptr, output.c_str()));
  char* manifest = nullptr;
  Check(sdp_run_manifest_json(run.ptr, &manifest));
  const std::string manifest_text = TakeString(manifest);
  std::string manifest_path = doc.value("manifest_path", "");
  if (manifest_path.empty()) manifest_path = output + ".manifest.json";
  WriteText(manifest_path, manifest_text + "\n");
  for (const auto& warning : json::parse(manifest_text).value("warnings", json::array())) {
    std::cerr << "warning: " << warning.get<std::string>() << "\n";
  }
  std::cerr << "theta=" << sdp_run_theta(run.ptr)
            << " published=" << sdp_run_published_length(run.ptr) << "\n";
  const std::string trace = doc.value("trace_path", "");
  if (!trace.empty()) {
    char* decision = nullptr;
    Check(sdp_threshold(stream.ptr, doc.dump().c_str(), trace.c_str(), &decision));
    sdp_free_string(decision);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streamdp: differentially private release of numeric streams"};
  app.require_subcommand(1);

  RunFlags threshold_flags;
  std::string threshold_out = "-";
  CLI::App* threshold = app.add_subcommand("threshold", "compute the threshold only");
  threshold_flags.Register(threshold);
  threshold->add_option("--seed", threshold_flags.seed, "random seed");
  threshold->add_option("--out", threshold_out, "decision JSON path (default stdout)");

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run a ToPS, ToPL or PAK pipeline");
  run_flags.Register(run);
  run->add_option("--seed", run_flags.seed, "random seed")->required();

  std::string spec;
  size_t synth_n = 0;
  uint64_t synth_seed = 0;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic stream");
  synth->add_option("--spec", spec, "constant(v) | uniform(a,b) | heavy_tail(mass,body_max,tail_max)")
      ->required();
  synth->add_option("--n", synth_n, "number of readings")->required();
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output file, one value per line")->required();

  std::string truth_path, published_path, query_mode = "uniform_length";
  uint64_t eval_r = 0, eval_seed = 0;
  size_t eval_queries = 200;
  double truncate_at = 0.0;
  int truth_column = -1;
  bool truth_header = false;
  CLI::App* eval = app.add_subcommand("eval", "score a published stream");
  eval->add_option("--truth", truth_path, "true stream file")->required();
  eval->add_option("--published", published_path, "published CSV")->required();
  eval->add_option("--r", eval_r, "maximal query range")->required();
  eval->add_option("--queries", eval_queries, "number of range queries");
  eval->add_option("--seed", eval_seed, "workload seed");
  eval->add_option("--query-mode", query_mode, "uniform_length or uniform_endpoints");
  eval->add_option("--truncate", truncate_at, "clip the truth at this value first");
  eval->add_option("--column", truth_column, "0-based CSV column of the truth");
  eval->add_flag("--header", truth_header, "truth file has a header row");

  std::string bench_config, bench_out;
  uint64_t bench_seed = 0;
  std::optional<unsigned> bench_threads;
  std::optional<size_t> bench_reps;
  CLI::App* bench = app.add_subcommand("bench", "run an experiment matrix");
  bench->add_option("--config", bench_config, "experiment JSON config")->required();
  bench->add_option("--seed", bench_seed, "random seed")->required();
  bench->add_option("--out", bench_out, "result CSV path (default: output_path or stdout)");
  bench->add_option("--threads", bench_threads, "worker threads (0: all cores)");
  bench->add_option("--repetitions", bench_reps, "repetitions per cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*threshold) return CmdThreshold(threshold_flags, threshold_out);
    if (*run) return CmdRun(run_flags);
    if (*synth) {
      StreamHandle stream;
      Check(sdp_stream_synthesize(spec.c_str(), synth_n, synth_seed, &stream.ptr));
      Check(sdp_stream_write(stream.ptr, synth_out.c_str()));
      return kExitOk;
    }
    if (*eval) {
      StreamHandle truth;
      Check(sdp_stream_load(truth_path.c_str(), truth_column, truth_header ? 1 : 0,
                            &truth.ptr));
      double mse = 0.0;
      Check(sdp_evaluate(truth.ptr, published_path.c_str(), eval_r, eval_queries,
                         eval_seed, query_mode.c_str(), truncate_at, &mse));
      std::cout << json{{"mse", mse}, {"queries", eval_queries}, {"r", eval_r},
                        {"seed", eval_seed}, {"query_mode", query_mode}}
                       .dump()
                << "\n";
      return kExitOk;
    }
    if (*bench) {
      json doc = ReadConfig(bench_config);
      doc["seed"] = bench_seed;
      if (bench_threads) doc["threads"] = *bench_threads;
      if (bench_reps) doc["repetitions"] = *bench_reps;
      char* csv = nullptr;
      char* errors = nullptr;
      Check(sdp_bench(doc.dump().c_str(), &csv, &errors));
      const std::string error_text = TakeString(errors);
      if (!error_text.empty()) std::cerr << error_text;
      std::string out = bench_out;
      if (out.empty()) out = doc.value("output_path", "-");
      WriteText(out, TakeString(csv));
      return kExitOk;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kExitInternal;
}
