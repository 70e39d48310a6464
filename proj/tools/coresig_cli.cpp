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

// coresig command-line front end. Talks to the library only through the C API.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coresig/coresig.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

int exit_code(coresig_status st) {
    switch (st) {
        case CORESIG_OK: return kExitOk;
        case CORESIG_E_INVALID_ARGUMENT:
        case CORESIG_E_CONFIG: return kExitUsage;
        case CORESIG_E_DATA: return kExitData;
        case CORESIG_E_IO: return kExitIo;
        case CORESIG_E_INTERNAL: break;
    }
    return 1;
}

// Prints the last error and returns the matching exit code.
int report(coresig_status st, const char* context) {
    if (st != CORESIG_OK) std::cerr << "coresig " << context << ": " << coresig_last_error() << '\n';
    return exit_code(st);
}

struct AnalysisFlags {
    std::string k_range = "2..7";
    int restarts = 16;
    std::uint64_t seed = 1;
    std::uint32_t bin_width = 16;
    std::string stddev = "population";
    std::string scaling = "minmax";
    bool merge_directions = false;
};

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& f) {
    cmd->add_option("--k-range", f.k_range, "Cluster counts, LO..HI")->capture_default_str();
    cmd->add_option("--restarts", f.restarts, "k-means restarts per k")->capture_default_str()->check(
        CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "k-means seed")->capture_default_str();
    cmd->add_option("--bin-width", f.bin_width, "Histogram bin width in bytes")->capture_default_str()->check(
        CLI::PositiveNumber);
    cmd->add_option("--stddev", f.stddev, "population or sample")
        ->capture_default_str()
        ->check(CLI::IsMember({"population", "sample"}));
    cmd->add_option("--scaling", f.scaling, "minmax or zscore")
        ->capture_default_str()
        ->check(CLI::IsMember({"minmax", "zscore"}));
    cmd->add_flag("--merge-directions", f.merge_directions, "Cluster unordered NF pairs");
}

// "2..7" or a single "3".
bool parse_k_range(const std::string& text, int& lo, int& hi) {
    try {
        const auto dots = text.find("..");
        std::size_t used = 0;
        if (dots == std::string::npos) {
            lo = hi = std::stoi(text, &used);
            return used == text.size();
        }
        const std::string a = text.substr(0, dots);
        const std::string b = text.substr(dots + 2);
        lo = std::stoi(a, &used);
        if (used != a.size()) return false;
        hi = std::stoi(b, &used);
        return used == b.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::optional<coresig_analysis_options> to_options(const AnalysisFlags& f) {
    coresig_analysis_options o;
    coresig_analysis_options_default(&o);
    if (!parse_k_range(f.k_range, o.k_min, o.k_max)) return std::nullopt;
    o.restarts = f.restarts;
    o.seed = f.seed;
    o.bin_width = f.bin_width;
    o.stddev_sample = f.stddev == "sample";
    o.scaling_zscore = f.scaling == "zscore";
    o.merge_directions = f.merge_directions;
    return o;
}

// "5s", "250ms", "2m", or bare seconds. Negative or junk -> nullopt.
std::optional<std::uint32_t> parse_period_ms(const std::string& text) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    const std::string unit = text.substr(used);
    double scale = 1000.0;
    if (unit == "ms") {
        scale = 1.0;
    } else if (unit == "m") {
        scale = 60000.0;
    } else if (!unit.empty() && unit != "s") {
        return std::nullopt;
    }
    const double ms = value * scale;
    if (!(ms >= 0) || ms > 4.0e9) return std::nullopt;
    return static_cast<std::uint32_t>(ms);
}

struct SimFlags {
    std::optional<std::uint64_t> seed;
    std::string duration;
    std::string config;
    std::string out = "-";
    std::string format = "csv";
    bool no_registration = false;
};

int run_simulate(const SimFlags& f) {
    coresig_sim_config* cfg = nullptr;
    if (auto st = coresig_sim_config_create(&cfg); st != CORESIG_OK) return report(st, "simulate");
    struct Guard {
        coresig_sim_config* p;
        ~Guard() { coresig_sim_config_destroy(p); }
    } guard{cfg};

    std::string config_path = f.config;
    if (config_path.empty()) {
        if (const char* env = std::getenv("CORESIG_CONFIG"); env != nullptr) config_path = env;
    }
    if (!config_path.empty()) {
        if (auto st = coresig_sim_config_load(cfg, config_path.c_str()); st != CORESIG_OK) {
            return report(st, "simulate");
        }
    }
    if (f.seed) coresig_sim_config_set_seed(cfg, *f.seed);
    if (!f.duration.empty()) {
        if (auto st = coresig_sim_config_set_duration(cfg, f.duration.c_str()); st != CORESIG_OK) {
            return report(st, "simulate");
        }
    }
    if (f.no_registration) coresig_sim_config_set_registration(cfg, 0);

    coresig_sim_summary summary{};
    const auto format = f.format == "jsonl" ? CORESIG_FORMAT_JSONL : CORESIG_FORMAT_CSV;
    if (auto st = coresig_simulate_to_file(cfg, f.out.c_str(), format, &summary); st != CORESIG_OK) {
        return report(st, "simulate");
    }
    // Keep stdout clean when the trace itself goes there.
    std::ostream& log = f.out == "-" ? std::cerr : std::cout;
    log << "packets: " << summary.total_packets << '\n';
    for (int k = 0; k < CORESIG_MSG_KIND_COUNT; ++k) {
        if (summary.per_kind[k] != 0) log << "  " << coresig_msg_kind_name(k) << ": " << summary.per_kind[k] << '\n';
    }
    return kExitOk;
}

struct AnalyzeFlags {
    std::string input;
    std::string nf_map;
    std::string out_dir;
    std::string format = "csv";
    std::uint64_t max_bad_rows = 0;
    AnalysisFlags analysis;
};

int run_analyze(const AnalyzeFlags& f) {
    const auto opts = to_options(f.analysis);
    if (!opts) {
        std::cerr << "coresig analyze: bad --k-range '" << f.analysis.k_range << "'\n";
        return kExitUsage;
    }
    coresig_analyzer* an = nullptr;
    if (auto st = coresig_analyzer_create(&*opts, &an); st != CORESIG_OK) return report(st, "analyze");
    struct Guard {
        coresig_analyzer* p;
        ~Guard() { coresig_analyzer_destroy(p); }
    } guard{an};

    if (!f.nf_map.empty()) {
        if (auto st = coresig_analyzer_load_nf_map(an, f.nf_map.c_str()); st != CORESIG_OK) {
            return report(st, "analyze");
        }
    }
    if (f.format == "csv") {
        if (auto st = coresig_analyzer_ingest_csv_file(an, f.input.c_str(), f.max_bad_rows); st != CORESIG_OK) {
            return report(st, "analyze");
        }
    } else {
        std::ifstream file;
        if (f.input != "-") {
            file.open(f.input);
            if (!file) {
                std::cerr << "coresig analyze: cannot open '" << f.input << "'\n";
                return kExitIo;
            }
        }
        std::istream& in = f.input == "-" ? std::cin : file;
        std::string line;
        std::uint64_t bad = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto st = coresig_analyzer_feed_json_line(an, line.c_str());
            if (st == CORESIG_E_DATA && ++bad <= f.max_bad_rows) continue;
            if (st != CORESIG_OK) return report(st, "analyze");
        }
        if (in.bad()) {
            std::cerr << "coresig analyze: read failed on '" << f.input << "'\n";
            return kExitIo;
        }
    }
    if (auto st = coresig_analyzer_write_report(an, f.out_dir.c_str()); st != CORESIG_OK) {
        return report(st, "analyze");
    }
    coresig_counters c{};
    coresig_analyzer_counters(an, &c);
    std::cout << "ingested: " << c.ingested << "\ncore packets: " << c.core_packets
              << "\nfiltered out: " << c.filtered_out << "\nmalformed skipped: " << c.malformed
              << "\nreport: " << f.out_dir << '\n';
    return kExitOk;
}

struct PipelineFlags {
    bool use_stdin = false;
    std::string listen;
    std::string nf_map;
    std::string out_dir;
    std::string snapshot_period = "0";
    AnalysisFlags analysis;
};

void announce_port(std::uint16_t port, void*) { std::cerr << "listening on port " << port << std::endl; }

int run_pipeline(const PipelineFlags& f) {
    const auto analysis = to_options(f.analysis);
    if (!analysis) {
        std::cerr << "coresig pipeline: bad --k-range '" << f.analysis.k_range << "'\n";
        return kExitUsage;
    }
    const auto period = parse_period_ms(f.snapshot_period);
    if (!period) {
        std::cerr << "coresig pipeline: bad --snapshot-period '" << f.snapshot_period << "'\n";
        return kExitUsage;
    }
    coresig_pipeline_options opts{};
    opts.analysis = *analysis;
    opts.out_dir = f.out_dir.c_str();
    opts.nf_map_path = f.nf_map.empty() ? nullptr : f.nf_map.c_str();
    opts.snapshot_period_ms = *period;

    coresig_pipeline_stats stats{};
    coresig_status st = CORESIG_OK;
    if (f.use_stdin) {
        st = coresig_pipeline_run_fd(&opts, STDIN_FILENO, &stats);
    } else {
        const auto colon = f.listen.rfind(':');
        std::string host = "0.0.0.0";
        std::string port_text = f.listen;
        if (colon != std::string::npos) {
            host = f.listen.substr(0, colon);
            port_text = f.listen.substr(colon + 1);
        }
        int port = -1;
        try {
            std::size_t used = 0;
            port = std::stoi(port_text, &used);
            if (used != port_text.size()) port = -1;
        } catch (const std::exception&) {
        }
        if (port < 0 || port > 65535) {
            std::cerr << "coresig pipeline: bad --listen '" << f.listen << "'\n";
            return kExitUsage;
        }
        st = coresig_pipeline_run_tcp(&opts, host.c_str(), static_cast<std::uint16_t>(port), announce_port, nullptr,
                                      &stats);
    }
    if (st != CORESIG_OK) return report(st, "pipeline");
    std::cout << "applied: " << stats.applied << "\nmalformed skipped: " << stats.skipped
              << "\nsnapshots: " << stats.snapshots << '\n';
    return kExitOk;
}

struct RenderFlags {
    std::string input;
    std::string out;
    std::string kind = "matrix";
    std::string title;
    std::string colormap = "viridis";
    bool log_scale = false;
    std::uint32_t bin_width = 16;
};

int run_render(const RenderFlags& f) {
    const coresig_status st =
        f.kind == "matrix"
            ? coresig_render_matrix_csv(f.input.c_str(), f.out.c_str(), f.title.c_str(), f.log_scale,
                                        f.colormap.c_str())
            : coresig_render_histogram_csv(f.input.c_str(), f.out.c_str(), f.title.c_str(), f.bin_width);
    return report(st, "render");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"5G core signaling trace simulator and analyzer"};
    app.require_subcommand(1);
    app.set_version_flag("--version", coresig_version());

    SimFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic control-plane trace");
    simulate->add_option("--seed", sim.seed, "RNG seed (default 1)");
    simulate->add_option("--duration", sim.duration, "Capture length, e.g. 60s, 138m (default 138m)");
    simulate->add_option("--config", sim.config, "JSON config file (default: $CORESIG_CONFIG)");
    simulate->add_option("--out,-o", sim.out, "Trace file, '-' for stdout")->capture_default_str();
    simulate->add_option("--format", sim.format, "csv or jsonl")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "jsonl"}));
    simulate->add_flag("--no-registration", sim.no_registration, "Start with every NF already registered");

    AnalyzeFlags an;
    auto* analyze = app.add_subcommand("analyze", "Build statistics, histograms and clusters from a trace");
    analyze->add_option("--input,-i", an.input, "Trace file, '-' for stdin")->required();
    analyze->add_option("--nf-map", an.nf_map, "Address-to-NF map");
    analyze->add_option("--out-dir", an.out_dir, "Report directory")->required();
    analyze->add_option("--format", an.format, "csv or jsonl")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "jsonl"}));
    analyze->add_option("--max-bad-rows", an.max_bad_rows, "Malformed rows tolerated before failing")
        ->capture_default_str();
    add_analysis_flags(analyze, an.analysis);

    PipelineFlags pl;
    auto* pipeline = app.add_subcommand("pipeline", "Aggregate a live JSON-line stream into rolling reports");
    auto* src_stdin = pipeline->add_flag("--stdin", pl.use_stdin, "Read the stream from stdin");
    auto* src_listen = pipeline->add_option("--listen", pl.listen, "Accept one TCP stream on [HOST:]PORT");
    src_stdin->excludes(src_listen);
    pipeline->add_option("--nf-map", pl.nf_map, "Address-to-NF map");
    pipeline->add_option("--out-dir", pl.out_dir, "Report directory")->required();
    pipeline->add_option("--snapshot-period", pl.snapshot_period, "Wall-clock period, e.g. 5s; 0 = end only")
        ->capture_default_str();
    add_analysis_flags(pipeline, pl.analysis);

    RenderFlags rf;
    auto* render = app.add_subcommand("render", "Render a matrix or histogram CSV to SVG");
    render->add_option("--input,-i", rf.input, "CSV file")->required();
    render->add_option("--out,-o", rf.out, "SVG file")->required();
    render->add_option("--kind", rf.kind, "matrix or histogram")
        ->capture_default_str()
        ->check(CLI::IsMember({"matrix", "histogram"}));
    render->add_option("--title", rf.title, "Figure title");
    render->add_option("--colormap", rf.colormap, "viridis, magma or greys")->capture_default_str();
    render->add_flag("--log", rf.log_scale, "Color by log10(1+v)");
    render->add_option("--bin-width", rf.bin_width, "Histogram bin width in bytes")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (simulate->parsed()) return run_simulate(sim);
    if (analyze->parsed()) return run_analyze(an);
    if (pipeline->parsed()) {
        if (!pl.use_stdin && pl.listen.empty()) {
            std::cerr << "coresig pipeline: one of --stdin or --listen is required\n";
            return kExitUsage;
        }
        return run_pipeline(pl);
    }
    return run_render(rf);
}
