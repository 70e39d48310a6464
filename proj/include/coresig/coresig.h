/*
 * Copyright (c) 2026 The coresig Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CORESIG_CORESIG_H
#define CORESIG_CORESIG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CORESIG_API __declspec(dllexport)
#else
#define CORESIG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coresig_status {
    CORESIG_OK = 0,
    CORESIG_E_INVALID_ARGUMENT = 1,
    CORESIG_E_CONFIG = 2,
    CORESIG_E_DATA = 3,
    CORESIG_E_IO = 4,
    CORESIG_E_INTERNAL = 5
} coresig_status;

/* Message for the most recent failure on the calling thread; "" if none. */
CORESIG_API const char* coresig_last_error(void);
CORESIG_API const char* coresig_status_name(coresig_status status);
CORESIG_API const char* coresig_version(void);

/* ---- simulator ---- */

typedef struct coresig_sim_config coresig_sim_config;

typedef enum coresig_trace_format { CORESIG_FORMAT_CSV = 0, CORESIG_FORMAT_JSONL = 1 } coresig_trace_format;

#define CORESIG_MSG_KIND_COUNT 14

typedef struct coresig_sim_summary {
    uint64_t total_packets;
    uint64_t per_kind[CORESIG_MSG_KIND_COUNT];
} coresig_sim_summary;

CORESIG_API coresig_status coresig_sim_config_create(coresig_sim_config** out);
/* Overlays a JSON config file onto the current values. */
CORESIG_API coresig_status coresig_sim_config_load(coresig_sim_config* cfg, const char* path);
CORESIG_API coresig_status coresig_sim_config_set_seed(coresig_sim_config* cfg, uint64_t seed);
CORESIG_API coresig_status coresig_sim_config_set_duration_us(coresig_sim_config* cfg, int64_t duration_us);
/* Accepts "60s", "138m", "250ms", "1h", "42us" or bare seconds. */
CORESIG_API coresig_status coresig_sim_config_set_duration(coresig_sim_config* cfg, const char* text);
CORESIG_API coresig_status coresig_sim_config_set_registration(coresig_sim_config* cfg, int enabled);
CORESIG_API void coresig_sim_config_destroy(coresig_sim_config* cfg);

/* path "-" writes to stdout. `summary` may be NULL. */
CORESIG_API coresig_status coresig_simulate_to_file(const coresig_sim_config* cfg, const char* path,
                                                    coresig_trace_format format, coresig_sim_summary* summary);
/* NULL for an out-of-range index. */
CORESIG_API const char* coresig_msg_kind_name(int kind);

/* ---- analysis ---- */

typedef struct coresig_analysis_options {
    int k_min;
    int k_max;
    int restarts;
    uint64_t seed;
    uint32_t bin_width;
    int stddev_sample;    /* 0 = population, 1 = sample */
    int scaling_zscore;   /* 0 = min-max, 1 = z-score */
    int merge_directions; /* cluster unordered NF pairs */
} coresig_analysis_options;

CORESIG_API void coresig_analysis_options_default(coresig_analysis_options* opts);

typedef struct coresig_analyzer coresig_analyzer;

typedef struct coresig_counters {
    uint64_t ingested;
    uint64_t filtered_out;
    uint64_t core_packets;
    uint64_t malformed;
} coresig_counters;

CORESIG_API coresig_status coresig_analyzer_create(const coresig_analysis_options* opts, coresig_analyzer** out);
/* Address-to-NF map; must be loaded before ingesting traces that use addresses. */
CORESIG_API coresig_status coresig_analyzer_load_nf_map(coresig_analyzer* an, const char* path);
/* path "-" reads stdin. Fails with CORESIG_E_DATA once more than
 * max_bad_rows rows are malformed; nothing from that file is kept then. */
CORESIG_API coresig_status coresig_analyzer_ingest_csv_file(coresig_analyzer* an, const char* path,
                                                            uint64_t max_bad_rows);
/* A malformed line is counted and reported as CORESIG_E_DATA. */
CORESIG_API coresig_status coresig_analyzer_feed_json_line(coresig_analyzer* an, const char* line);
CORESIG_API coresig_status coresig_analyzer_counters(const coresig_analyzer* an, coresig_counters* out);
CORESIG_API coresig_status coresig_analyzer_write_report(const coresig_analyzer* an, const char* out_dir);
CORESIG_API void coresig_analyzer_destroy(coresig_analyzer* an);

/* ---- streaming pipeline ---- */

typedef struct coresig_pipeline_options {
    coresig_analysis_options analysis;
    const char* out_dir;
    const char* nf_map_path; /* may be NULL */
    uint32_t snapshot_period_ms; /* 0 = only a final snapshot */
} coresig_pipeline_options;

typedef struct coresig_pipeline_stats {
    uint64_t applied;
    uint64_t skipped;
    uint64_t snapshots;
} coresig_pipeline_stats;

typedef void (*coresig_listen_cb)(uint16_t port, void* user);

/* Reads JSON lines from fd until EOF. The fd is not closed. */
CORESIG_API coresig_status coresig_pipeline_run_fd(const coresig_pipeline_options* opts, int fd,
                                                   coresig_pipeline_stats* stats);
/* Accepts one TCP connection on host:port and reads it until EOF. */
CORESIG_API coresig_status coresig_pipeline_run_tcp(const coresig_pipeline_options* opts, const char* host,
                                                    uint16_t port, coresig_listen_cb on_listening, void* user,
                                                    coresig_pipeline_stats* stats);

/* ---- rendering ---- */

/* 10x10 grid CSV -> SVG heatmap. colormap may be NULL (viridis). */
CORESIG_API coresig_status coresig_render_matrix_csv(const char* in_path, const char* out_svg, const char* title,
                                                     int log_scale, const char* colormap);
CORESIG_API coresig_status coresig_render_histogram_csv(const char* in_path, const char* out_svg,
                                                        const char* title, uint32_t bin_width);

#ifdef __cplusplus
}
#endif

#endif
