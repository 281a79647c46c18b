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

#include "streamdp/streamdp.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "streamdp/errors.h"
#include "streamdp/experiment.h"
#include "streamdp/harness.h"
#include "streamdp/io.h"
#include "streamdp/pipeline.h"

struct sdp_stream {
  std::vector<double> values;
};

struct sdp_run {
  streamdp::PipelineRun run;
  streamdp::PipelineOptions options;
};

namespace {

thread_local std::string g_last_error;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

sdp_status Fail(sdp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
sdp_status Guard(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SDP_OK;
  } catch (const IoError& e) {
    return Fail(SDP_ERR_IO, e.what());
  } catch (const streamdp::ConfigError& e) {
    return Fail(SDP_ERR_CONFIG, e.what());
  } catch (const streamdp::DataError& e) {
    return Fail(SDP_ERR_DATA, e.what());
  } catch (const streamdp::InvalidParameterError& e) {
    return Fail(SDP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SDP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SDP_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(SDP_ERR_INTERNAL, "unknown error");
  }
}

char* CopyString(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

std::ofstream OpenOut(const char* path) {
  std::ofstream out(path);
  if (!out) throw IoError(std::string("cannot open for writing: ") + path);
  return out;
}

void Require(bool ok, const char* message) {
  if (!ok) throw streamdp::InvalidParameterError(message);
}

}  // namespace

extern "C" {

const char* sdp_version(void) { return "0.1.0"; }

const char* sdp_last_error(void) { return g_last_error.c_str(); }

void sdp_free_string(char* text) { std::free(text); }

sdp_status sdp_stream_from_values(const double* values, size_t n,
                                  sdp_stream** out) {
  return Guard([&] {
    Require(out != nullptr, "out must not be NULL");
    Require(values != nullptr || n == 0, "values must not be NULL");
    for (size_t i = 0; i < n; ++i) {
      if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
        throw streamdp::DataError("value " + std::to_string(i + 1) +
                                  " is negative or not finite");
      }
    }
    *out = new sdp_stream{std::vector<double>(values, values + n)};
  });
}

sdp_status sdp_stream_load(const char* path, int column, int header,
                           sdp_stream** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "path and out must not be NULL");
    std::ifstream probe(path);
    if (!probe) throw IoError(std::string("cannot read ") + path);
    streamdp::LoadOptions options;
    options.column = column;
    options.header = header != 0;
    *out = new sdp_stream{streamdp::ParseStream(probe, options)};
  });
}

sdp_status sdp_stream_synthesize(const char* spec, size_t n, uint64_t seed,
                                 sdp_stream** out) {
  return Guard([&] {
    Require(spec != nullptr && out != nullptr, "spec and out must not be NULL");
    const auto parsed = streamdp::SyntheticSpec::Parse(spec);
    *out = new sdp_stream{streamdp::GenSynthetic(parsed, n, seed)};
  });
}

size_t sdp_stream_length(const sdp_stream* stream) {
  return stream ? stream->values.size() : 0;
}

const double* sdp_stream_data(const sdp_stream* stream) {
  return stream ? stream->values.data() : nullptr;
}

sdp_status sdp_stream_profile_json(const sdp_stream* stream, char** out_json) {
  return Guard([&] {
    Require(stream != nullptr && out_json != nullptr, "NULL argument");
    if (stream->values.empty()) throw streamdp::DataError("empty stream");
    *out_json = CopyString(
        streamdp::ProfileJson(streamdp::ProfileStream(stream->values)).dump());
  });
}

sdp_status sdp_stream_write(const sdp_stream* stream, const char* path) {
  return Guard([&] {
    Require(stream != nullptr && path != nullptr, "NULL argument");
    std::ofstream out = OpenOut(path);
    for (double v : stream->values) out << streamdp::FormatDouble(v) << '\n';
    if (!out) throw IoError(std::string("write failed: ") + path);
  });
}

void sdp_stream_free(sdp_stream* stream) { delete stream; }

sdp_status sdp_threshold(const sdp_stream* stream, const char* config_json,
                         const char* trace_path, char** out_decision_json) {
  return Guard([&] {
    Require(stream != nullptr && config_json != nullptr &&
                out_decision_json != nullptr,
            "NULL argument");
    const streamdp::RunConfig cfg = streamdp::RunConfigFromString(config_json);
    const streamdp::ThresholdDecision d =
        streamdp::SelectThreshold(stream->values, cfg.options);
    if (trace_path) {
      std::ofstream out = OpenOut(trace_path);
      streamdp::WriteTraceCsv(d, out);
    }
    *out_decision_json = CopyString(
        streamdp::ThresholdJson(d, trace_path ? trace_path : "").dump(2));
  });
}

sdp_status sdp_run_pipeline(const sdp_stream* stream, const char* config_json,
                            sdp_run** out) {
  return Guard([&] {
    Require(stream != nullptr && config_json != nullptr && out != nullptr,
            "NULL argument");
    const streamdp::RunConfig cfg = streamdp::RunConfigFromString(config_json);
    auto* run = new sdp_run{streamdp::RunPipeline(stream->values, cfg.options),
                            cfg.options};
    *out = run;
  });
}

size_t sdp_run_holdout(const sdp_run* run) { return run ? run->run.holdout : 0; }

size_t sdp_run_published_length(const sdp_run* run) {
  return run ? run->run.published.size() : 0;
}

const double* sdp_run_published(const sdp_run* run) {
  return run ? run->run.published.data() : nullptr;
}

double sdp_run_theta(const sdp_run* run) {
  return run ? run->run.threshold.theta : 0.0;
}

sdp_status sdp_run_range_query(const sdp_run* run, uint64_t first,
                               uint64_t last, double* value, int* partial) {
  return Guard([&] {
    Require(run != nullptr && value != nullptr, "NULL argument");
    const auto answer = run->run.AnswerRangeQuery(first, last);
    *value = answer.value;
    if (partial) *partial = answer.partial ? 1 : 0;
  });
}

sdp_status sdp_run_manifest_json(const sdp_run* run, char** out_json) {
  return Guard([&] {
    Require(run != nullptr && out_json != nullptr, "NULL argument");
    *out_json = CopyString(streamdp::ManifestJson(run->run, run->options).dump(2));
  });
}

sdp_status sdp_run_write_csv(const sdp_run* run, const char* path) {
  return Guard([&] {
    Require(run != nullptr && path != nullptr, "NULL argument");
    std::ofstream out = OpenOut(path);
    streamdp::WritePublishedCsv(run->run, out);
    if (!out) throw IoError(std::string("write failed: ") + path);
  });
}

void sdp_run_free(sdp_run* run) { delete run; }

sdp_status sdp_evaluate(const sdp_stream* truth, const char* published_csv_path,
                        uint64_t r, size_t count, uint64_t seed,
                        const char* query_mode, double truncate_at,
                        double* out_mse) {
  return Guard([&] {
    Require(truth != nullptr && published_csv_path != nullptr &&
                out_mse != nullptr,
            "NULL argument");
    Require(r >= 1 && count >= 1, "r and count must be >= 1");
    std::ifstream in(published_csv_path);
    if (!in) throw IoError(std::string("cannot read ") + published_csv_path);
    const streamdp::PublishedStream published = streamdp::ReadPublishedCsv(in);
    const size_t h = published.holdout;
    if (truth->values.size() != h + published.values.size()) {
      throw streamdp::DataError("published stream has " +
                                std::to_string(h + published.values.size()) +
                                " rows but the true stream has " +
                                std::to_string(truth->values.size()));
    }
    if (published.values.empty()) throw streamdp::DataError("nothing published");
    std::vector<double> region(truth->values.begin() + h, truth->values.end());
    if (truncate_at > 0.0) {
      for (double& v : region) v = std::min(v, truncate_at);
    }
    const auto mode = streamdp::QueryModeFromString(
        query_mode ? query_mode : "uniform_length");
    const auto workload =
        streamdp::GenQueries(region.size(), r, count, seed, mode);
    *out_mse = streamdp::Evaluate(region, published.values, workload).mse;
  });
}

sdp_status sdp_bench(const char* experiment_json, char** out_csv,
                     char** out_errors) {
  return Guard([&] {
    Require(experiment_json != nullptr && out_csv != nullptr, "NULL argument");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(experiment_json);
    } catch (const nlohmann::json::exception& e) {
      throw streamdp::ConfigError(std::string("config is not valid JSON: ") +
                                  e.what());
    }
    const streamdp::ExperimentConfig cfg = streamdp::ExperimentConfigFromJson(doc);
    const std::vector<double> data = streamdp::ExperimentData(cfg);
    const auto rows = streamdp::RunExperiment(cfg, data);
    std::ostringstream csv;
    streamdp::WriteExperimentCsv(rows, csv);
    std::ostringstream errors;
    for (const auto& row : rows) {
      if (row.failures) {
        errors << row.method << " eps=" << streamdp::FormatDouble(row.epsilon)
               << ": " << row.failures << " failed cell(s): " << row.first_error
               << '\n';
      }
    }
    *out_csv = CopyString(csv.str());
    if (out_errors) *out_errors = CopyString(errors.str());
  });
}

}  // extern "C"
