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

#ifndef STREAMDP_STREAMDP_H_
#define STREAMDP_STREAMDP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SDP_API __declspec(dllexport)
#else
#define SDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdp_status {
  SDP_OK = 0,
  SDP_ERR_INVALID_ARGUMENT = 1,
  SDP_ERR_CONFIG = 2,
  SDP_ERR_DATA = 3,
  SDP_ERR_IO = 4,
  SDP_ERR_INTERNAL = 5
} sdp_status;

typedef struct sdp_stream sdp_stream;
typedef struct sdp_run sdp_run;

SDP_API const char* sdp_version(void);

/* Message for the last failing call on this thread; "" if none. */
SDP_API const char* sdp_last_error(void);

/* Releases strings returned through char** out-parameters. */
SDP_API void sdp_free_string(char* text);

/* Streams of non-negative readings. */
SDP_API sdp_status sdp_stream_from_values(const double* values, size_t n,
                                          sdp_stream** out);
/* column < 0 reads one value per line; otherwise the 0-based CSV column. */
SDP_API sdp_status sdp_stream_load(const char* path, int column, int header,
                                   sdp_stream** out);
/* spec: "constant(v)", "uniform(a,b)" or "heavy_tail(mass,body_max,tail_max)". */
SDP_API sdp_status sdp_stream_synthesize(const char* spec, size_t n,
                                         uint64_t seed, sdp_stream** out);
SDP_API size_t sdp_stream_length(const sdp_stream* stream);
SDP_API const double* sdp_stream_data(const sdp_stream* stream);
/* {n, max, p85, p95, p99.5, mean} */
SDP_API sdp_status sdp_stream_profile_json(const sdp_stream* stream,
                                           char** out_json);
/* One value per line. */
SDP_API sdp_status sdp_stream_write(const sdp_stream* stream, const char* path);
SDP_API void sdp_stream_free(sdp_stream* stream);

/* Threshold stage over the first m readings. config_json uses the run config
 * schema. When trace_path is non-NULL the candidate scores are written there
 * as CSV. */
SDP_API sdp_status sdp_threshold(const sdp_stream* stream,
                                 const char* config_json,
                                 const char* trace_path,
                                 char** out_decision_json);

/* Full pipeline. Input and output paths in the config are ignored here. */
SDP_API sdp_status sdp_run_pipeline(const sdp_stream* stream,
                                    const char* config_json, sdp_run** out);
SDP_API size_t sdp_run_holdout(const sdp_run* run);
SDP_API size_t sdp_run_published_length(const sdp_run* run);
/* Published values for readings holdout+1 .. holdout+length. */
SDP_API const double* sdp_run_published(const sdp_run* run);
SDP_API double sdp_run_theta(const sdp_run* run);
/* Range sum over 1-based inclusive indices. *partial is set to 1 when the
 * range overlaps the unpublished holdout. */
SDP_API sdp_status sdp_run_range_query(const sdp_run* run, uint64_t first,
                                       uint64_t last, double* value,
                                       int* partial);
SDP_API sdp_status sdp_run_manifest_json(const sdp_run* run, char** out_json);
/* index,value rows; holdout rows have an empty value. */
SDP_API sdp_status sdp_run_write_csv(const sdp_run* run, const char* path);
SDP_API void sdp_run_free(sdp_run* run);

/* Scores a published CSV against the true stream over a random workload of
 * `count` range queries no longer than r. When truncate_at > 0 the truth is
 * clipped at that value first. query_mode: "uniform_length" or
 * "uniform_endpoints". */
SDP_API sdp_status sdp_evaluate(const sdp_stream* truth,
                                const char* published_csv_path, uint64_t r,
                                size_t count, uint64_t seed,
                                const char* query_mode, double truncate_at,
                                double* out_mse);

/* Runs an experiment matrix and returns the result CSV. When out_errors is
 * non-NULL it receives one line per method/epsilon cell group that had
 * failures (empty if none). */
SDP_API sdp_status sdp_bench(const char* experiment_json, char** out_csv,
                             char** out_errors);

#ifdef __cplusplus
}
#endif

#endif /* STREAMDP_STREAMDP_H_ */
