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

#include "coresig/coresig.h"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "analysis.hpp"
#include "ingest.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "sim.hpp"

struct coresig_sim_config {
    coresig::SimConfig config;
};

struct coresig_analyzer {
    coresig::AnalysisOptions options;
    coresig::NfAddressMap map;
    std::vector<coresig::PacketRecord> records;
    std::uint64_t malformed = 0;
    std::size_t json_lines = 0;
};

namespace {

thread_local std::string g_last_error;

coresig_status fail(coresig_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <typename F>
coresig_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return CORESIG_OK;
    } catch (const coresig::ConfigError& e) {
        return fail(CORESIG_E_CONFIG, e.what());
    } catch (const coresig::DataError& e) {
        return fail(CORESIG_E_DATA, e.what());
    } catch (const coresig::IoError& e) {
        return fail(CORESIG_E_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CORESIG_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CORESIG_E_INTERNAL, e.what());
    } catch (...) {
        return fail(CORESIG_E_INTERNAL, "unknown error");
    }
}

coresig::AnalysisOptions to_options(const coresig_analysis_options& o) {
    coresig::AnalysisOptions out;
    out.k_min = o.k_min;
    out.k_max = o.k_max;
    out.restarts = o.restarts;
    out.seed = o.seed;
    out.bin_width = o.bin_width;
    out.stddev_mode = o.stddev_sample ? coresig::StddevMode::Sample : coresig::StddevMode::Population;
    out.scaling = o.scaling_zscore ? coresig::Scaling::ZScore : coresig::Scaling::MinMax;
    out.merge_directions = o.merge_directions != 0;
    out.validate();
    return out;
}

std::string read_text(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw coresig::IoError(std::string("cannot open '") + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw coresig::IoError(std::string("failed reading '") + path + "'");
    return ss.str();
}

void write_text(const char* path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw coresig::IoError(std::string("cannot write '") + path + "'");
    out << text;
    out.close();
    if (!out) throw coresig::IoError(std::string("failed writing '") + path + "'");
}

coresig::PipelineOptions to_pipeline(const coresig_pipeline_options& o, coresig::NfAddressMap& map) {
    if (o.out_dir == nullptr) throw coresig::ConfigError("pipeline needs an output directory");
    coresig::PipelineOptions out;
    out.analysis = to_options(o.analysis);
    out.out_dir = o.out_dir;
    out.snapshot_period = std::chrono::milliseconds(o.snapshot_period_ms);
    if (o.nf_map_path != nullptr) map = coresig::NfAddressMap::load(o.nf_map_path);
    return out;
}

void fill_stats(const coresig::PipelineStats& s, coresig_pipeline_stats* out) {
    if (out == nullptr) return;
    out->applied = s.applied;
    out->skipped = s.skipped;
    out->snapshots = s.snapshots;
}

#define CORESIG_REQUIRE(cond, what)                                   \
    do {                                                              \
        if (!(cond)) return fail(CORESIG_E_INVALID_ARGUMENT, (what)); \
    } while (0)

}  // namespace

extern "C" {

const char* coresig_last_error(void) { return g_last_error.c_str(); }

const char* coresig_status_name(coresig_status status) {
    switch (status) {
        case CORESIG_OK: return "ok";
        case CORESIG_E_INVALID_ARGUMENT: return "invalid argument";
        case CORESIG_E_CONFIG: return "config error";
        case CORESIG_E_DATA: return "data error";
        case CORESIG_E_IO: return "I/O error";
        case CORESIG_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* coresig_version(void) { return "1.0.0"; }

coresig_status coresig_sim_config_create(coresig_sim_config** out) {
    CORESIG_REQUIRE(out != nullptr, "out is null");
    return guarded([&] { *out = new coresig_sim_config{}; });
}

coresig_status coresig_sim_config_load(coresig_sim_config* cfg, const char* path) {
    CORESIG_REQUIRE(cfg != nullptr && path != nullptr, "config and path are required");
    return guarded([&] { cfg->config = coresig::load_sim_config(path, cfg->config); });
}

coresig_status coresig_sim_config_set_seed(coresig_sim_config* cfg, uint64_t seed) {
    CORESIG_REQUIRE(cfg != nullptr, "config is null");
    cfg->config.rng_seed = seed;
    return CORESIG_OK;
}

coresig_status coresig_sim_config_set_duration_us(coresig_sim_config* cfg, int64_t duration_us) {
    CORESIG_REQUIRE(cfg != nullptr, "config is null");
    if (duration_us < 0) return fail(CORESIG_E_CONFIG, "duration must be >= 0");
    cfg->config.duration_us = duration_us;
    return CORESIG_OK;
}

coresig_status coresig_sim_config_set_duration(coresig_sim_config* cfg, const char* text) {
    CORESIG_REQUIRE(cfg != nullptr && text != nullptr, "config and duration are required");
    return guarded([&] { cfg->config.duration_us = coresig::parse_duration_us(text); });
}

coresig_status coresig_sim_config_set_registration(coresig_sim_config* cfg, int enabled) {
    CORESIG_REQUIRE(cfg != nullptr, "config is null");
    cfg->config.registration = enabled != 0;
    return CORESIG_OK;
}

void coresig_sim_config_destroy(coresig_sim_config* cfg) { delete cfg; }

coresig_status coresig_simulate_to_file(const coresig_sim_config* cfg, const char* path,
                                        coresig_trace_format format, coresig_sim_summary* summary) {
    CORESIG_REQUIRE(cfg != nullptr && path != nullptr, "config and path are required");
    CORESIG_REQUIRE(format == CORESIG_FORMAT_CSV || format == CORESIG_FORMAT_JSONL, "unknown trace format");
    return guarded([&] {
        cfg->config.validate();
        const bool to_stdout = std::string_view(path) == "-";
        std::ofstream file;
        if (!to_stdout) {
            file.open(path, std::ios::binary | std::ios::trunc);
            if (!file) throw coresig::IoError(std::string("cannot write '") + path + "'");
        }
        std::ostream& out = to_stdout ? std::cout : file;
        if (format == CORESIG_FORMAT_CSV) out << coresig::kCsvHeader << '\n';
        const auto result = coresig::simulate(cfg->config, [&](const coresig::PacketRecord& rec) {
            out << (format == CORESIG_FORMAT_CSV ? coresig::format_csv_row(rec) : coresig::format_json_line(rec))
                << '\n';
        });
        out.flush();
        if (!out) throw coresig::IoError(std::string("failed writing '") + path + "'");
        if (summary != nullptr) {
            summary->total_packets = result.total_packets;
            for (std::size_t i = 0; i < coresig::kMsgKindCount; ++i) summary->per_kind[i] = result.per_kind[i];
        }
    });
}

const char* coresig_msg_kind_name(int kind) {
    if (kind < 0 || kind >= static_cast<int>(coresig::kMsgKindCount)) return nullptr;
    // Views returned by to_string point at static literals.
    return coresig::to_string(static_cast<coresig::MsgKind>(kind)).data();
}

void coresig_analysis_options_default(coresig_analysis_options* opts) {
    if (opts == nullptr) return;
    const coresig::AnalysisOptions d;
    opts->k_min = d.k_min;
    opts->k_max = d.k_max;
    opts->restarts = d.restarts;
    opts->seed = d.seed;
    opts->bin_width = d.bin_width;
    opts->stddev_sample = 0;
    opts->scaling_zscore = 0;
    opts->merge_directions = 0;
}

coresig_status coresig_analyzer_create(const coresig_analysis_options* opts, coresig_analyzer** out) {
    CORESIG_REQUIRE(out != nullptr, "out is null");
    return guarded([&] {
        coresig_analysis_options defaults;
        coresig_analysis_options_default(&defaults);
        auto an = std::make_unique<coresig_analyzer>();
        an->options = to_options(opts != nullptr ? *opts : defaults);
        *out = an.release();
    });
}

coresig_status coresig_analyzer_load_nf_map(coresig_analyzer* an, const char* path) {
    CORESIG_REQUIRE(an != nullptr && path != nullptr, "analyzer and path are required");
    return guarded([&] { an->map = coresig::NfAddressMap::load(path); });
}

coresig_status coresig_analyzer_ingest_csv_file(coresig_analyzer* an, const char* path, uint64_t max_bad_rows) {
    CORESIG_REQUIRE(an != nullptr && path != nullptr, "analyzer and path are required");
    return guarded([&] {
        auto result = std::string_view(path) == "-" ? coresig::read_csv_trace(std::cin, an->map, max_bad_rows)
                                                    : coresig::read_csv_trace(std::string(path), an->map, max_bad_rows);
        an->records.insert(an->records.end(), std::make_move_iterator(result.records.begin()),
                           std::make_move_iterator(result.records.end()));
        an->malformed += result.malformed;
    });
}

coresig_status coresig_analyzer_feed_json_line(coresig_analyzer* an, const char* line) {
    CORESIG_REQUIRE(an != nullptr && line != nullptr, "analyzer and line are required");
    ++an->json_lines;
    const coresig_status st =
        guarded([&] { an->records.push_back(coresig::parse_json_record(line, an->map, an->json_lines)); });
    if (st == CORESIG_E_DATA) ++an->malformed;
    return st;
}

coresig_status coresig_analyzer_counters(const coresig_analyzer* an, coresig_counters* out) {
    CORESIG_REQUIRE(an != nullptr && out != nullptr, "analyzer and out are required");
    out->ingested = an->records.size();
    out->core_packets = 0;
    for (const auto& rec : an->records) {
        if (rec.src.is_core() && rec.dst.is_core() && *rec.src.nf != *rec.dst.nf) ++out->core_packets;
    }
    out->filtered_out = out->ingested - out->core_packets;
    out->malformed = an->malformed;
    return CORESIG_OK;
}

coresig_status coresig_analyzer_write_report(const coresig_analyzer* an, const char* out_dir) {
    CORESIG_REQUIRE(an != nullptr && out_dir != nullptr, "analyzer and out_dir are required");
    return guarded([&] {
        auto snapshot = coresig::snapshot_from_records(an->records, an->options.bin_width, an->malformed);
        coresig::write_report(coresig::analyze_snapshot(std::move(snapshot), an->options), an->options, out_dir);
    });
}

void coresig_analyzer_destroy(coresig_analyzer* an) { delete an; }

coresig_status coresig_pipeline_run_fd(const coresig_pipeline_options* opts, int fd, coresig_pipeline_stats* stats) {
    CORESIG_REQUIRE(opts != nullptr && fd >= 0, "options and a valid fd are required");
    return guarded([&] {
        coresig::NfAddressMap map;
        const auto options = to_pipeline(*opts, map);
        fill_stats(coresig::run_pipeline(coresig::fd_lines(fd), map, options), stats);
    });
}

coresig_status coresig_pipeline_run_tcp(const coresig_pipeline_options* opts, const char* host, uint16_t port,
                                        coresig_listen_cb on_listening, void* user, coresig_pipeline_stats* stats) {
    CORESIG_REQUIRE(opts != nullptr && host != nullptr, "options and host are required");
    return guarded([&] {
        coresig::NfAddressMap map;
        const auto options = to_pipeline(*opts, map);
        std::function<void(std::uint16_t)> cb;
        if (on_listening != nullptr) cb = [&](std::uint16_t p) { on_listening(p, user); };
        fill_stats(coresig::run_pipeline_tcp(host, port, map, options, cb), stats);
    });
}

coresig_status coresig_render_matrix_csv(const char* in_path, const char* out_svg, const char* title, int log_scale,
                                         const char* colormap) {
    CORESIG_REQUIRE(in_path != nullptr && out_svg != nullptr, "input and output paths are required");
    return guarded([&] {
        coresig::HeatmapSpec spec;
        spec.values = coresig::parse_grid_csv(read_text(in_path));
        spec.title = title != nullptr ? title : "";
        spec.scale = log_scale ? coresig::HeatScale::Log10 : coresig::HeatScale::Linear;
        if (colormap != nullptr) spec.colormap = colormap;
        write_text(out_svg, coresig::render_heatmap(spec));
    });
}

coresig_status coresig_render_histogram_csv(const char* in_path, const char* out_svg, const char* title,
                                            uint32_t bin_width) {
    CORESIG_REQUIRE(in_path != nullptr && out_svg != nullptr, "input and output paths are required");
    return guarded([&] {
        const auto h = coresig::parse_histogram_csv(read_text(in_path), bin_width);
        write_text(out_svg, coresig::render_histogram(h, title != nullptr ? title : ""));
    });
}

}  // extern "C"
