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

#include "report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <system_error>

#include <json.hpp>

namespace coresig {

namespace {

using nlohmann::ordered_json;

struct Rgb {
    double r, g, b;
};

const std::map<std::string, std::vector<Rgb>, std::less<>>& colormaps() {
    static const std::map<std::string, std::vector<Rgb>, std::less<>> maps = {
        {"viridis", {{68, 1, 84}, {65, 68, 135}, {42, 120, 142}, {34, 168, 132}, {122, 209, 81}, {253, 231, 37}}},
        {"magma", {{0, 0, 4}, {81, 18, 124}, {183, 55, 121}, {252, 137, 97}, {252, 253, 191}}},
        {"greys", {{255, 255, 255}, {0, 0, 0}}},
    };
    return maps;
}

std::string ramp_color(const std::vector<Rgb>& anchors, double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * static_cast<double>(anchors.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), anchors.size() - 2);
    const double f = pos - static_cast<double>(i);
    const Rgb& a = anchors[i];
    const Rgb& b = anchors[i + 1];
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(a.r + (b.r - a.r) * f)),
                  static_cast<int>(std::lround(a.g + (b.g - a.g) * f)),
                  static_cast<int>(std::lround(a.b + (b.b - a.b) * f)));
    return buf;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string text(double x, double y, std::string_view body, std::string_view attrs = "") {
    std::string out = "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\"";
    if (!attrs.empty()) {
        out += ' ';
        out += attrs;
    }
    out += '>';
    out += xml_escape(body);
    out += "</text>\n";
    return out;
}

std::string svg_open(int width, int height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) +
           "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view textv) {
    std::vector<std::string_view> out;
    for (auto line : split(textv, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string histogram_name(const Histogram& h) {
    return "nrf_" + std::string(to_string(h.direction)) + "_" + std::string(to_string(h.peer));
}

}  // namespace

std::string_view to_string(Stat stat) {
    switch (stat) {
        case Stat::Mean: return "mean";
        case Stat::Max: return "max";
        case Stat::Stddev: return "stddev";
        case Stat::Count: return "count";
    }
    return "?";
}

ValueGrid stat_grid(const StatsMatrix& m, Stat stat, StddevMode mode) {
    ValueGrid grid(kNfCount, std::vector<double>(kNfCount, 0.0));
    for (NfKind src : kAllNfs) {
        for (NfKind dst : kAllNfs) {
            const StatsSummary s = m.cell(src, dst).finalize(mode);
            double v = 0.0;
            switch (stat) {
                case Stat::Mean: v = s.mean; break;
                case Stat::Max: v = s.max; break;
                case Stat::Stddev: v = s.stddev; break;
                case Stat::Count: v = static_cast<double>(s.count); break;
            }
            grid[index_of(src)][index_of(dst)] = v;
        }
    }
    return grid;
}

ValueGrid label_grid(const LabelGrid& labels) {
    ValueGrid grid(kNfCount, std::vector<double>(kNfCount, 0.0));
    for (std::size_t i = 0; i < kNfCount; ++i) {
        for (std::size_t j = 0; j < kNfCount; ++j) grid[i][j] = labels[i][j];
    }
    return grid;
}

std::string format_number(double v) { return fmt("%.9g", v); }

std::string grid_csv(const ValueGrid& grid) {
    if (grid.size() != kNfCount) throw DataError("grid must have 10 rows");
    std::string out = "src";
    for (NfKind nf : kAllNfs) {
        out += ',';
        out += to_string(nf);
    }
    out += '\n';
    for (std::size_t i = 0; i < kNfCount; ++i) {
        if (grid[i].size() != kNfCount) throw DataError("grid must have 10 columns");
        out += to_string(kAllNfs[i]);
        for (double v : grid[i]) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

ValueGrid parse_grid_csv(std::string_view textv) {
    const auto lines = lines_of(textv);
    if (lines.size() != kNfCount + 1) throw DataError("grid CSV must have a header and 10 rows");
    const auto header = split(lines[0], ',');
    if (header.size() != kNfCount + 1 || header[0] != "src") throw DataError("grid CSV: bad header");
    for (std::size_t j = 0; j < kNfCount; ++j) {
        if (parse_nf(header[j + 1]) != kAllNfs[j]) throw DataError("grid CSV: columns must follow NF order");
    }
    ValueGrid grid(kNfCount, std::vector<double>(kNfCount, 0.0));
    for (std::size_t i = 0; i < kNfCount; ++i) {
        const auto cells = split(lines[i + 1], ',');
        if (cells.size() != kNfCount + 1 || parse_nf(cells[0]) != kAllNfs[i]) {
            throw DataError("grid CSV: bad row " + std::to_string(i + 1));
        }
        for (std::size_t j = 0; j < kNfCount; ++j) grid[i][j] = parse_double(cells[j + 1]);
    }
    return grid;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_start,count\n";
    for (const auto& [bin, count] : h.bins) {
        out += std::to_string(bin * static_cast<std::int64_t>(h.bin_width_bytes));
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    return out;
}

Histogram parse_histogram_csv(std::string_view textv, std::uint32_t bin_width) {
    if (bin_width < 1) throw DataError("histogram bin width must be >= 1");
    const auto lines = lines_of(textv);
    if (lines.empty() || lines[0] != "bin_start,count") throw DataError("histogram CSV: bad header");
    Histogram h;
    h.bin_width_bytes = bin_width;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 2) throw DataError("histogram CSV: bad row " + std::to_string(i));
        const double start = parse_double(cells[0]);
        const double count = parse_double(cells[1]);
        if (start < 0 || count < 0) throw DataError("histogram CSV: negative value on row " + std::to_string(i));
        h.bins[static_cast<std::int64_t>(start) / bin_width] += static_cast<std::uint64_t>(count);
    }
    return h;
}

std::string render_heatmap(const HeatmapSpec& spec) {
    if (spec.values.size() != kNfCount ||
        std::any_of(spec.values.begin(), spec.values.end(), [](const auto& row) { return row.size() != kNfCount; })) {
        throw DataError("heatmap grid must be 10x10");
    }
    auto cmap = colormaps().find(spec.colormap);
    if (cmap == colormaps().end()) throw DataError("unknown colormap '" + spec.colormap + "'");

    ValueGrid shown = spec.values;
    for (auto& row : shown) {
        for (double& v : row) {
            if (!std::isfinite(v)) throw DataError("heatmap values must be finite");
            if (spec.scale == HeatScale::Log10) {
                if (v < 0) throw DataError("log-scale heatmap values must be >= 0");
                v = std::log10(1.0 + v);
            }
        }
    }
    double lo = shown[0][0];
    double hi = shown[0][0];
    for (const auto& row : shown) {
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double range = hi - lo;
    const auto norm = [&](double v) { return range > 0 ? (v - lo) / range : 0.0; };
    const auto unscale = [&](double v) { return spec.scale == HeatScale::Log10 ? std::pow(10.0, v) - 1.0 : v; };

    constexpr double x0 = 90, y0 = 60, cell = 40;
    std::string svg = svg_open(660, 560);
    svg += text(330, 30, spec.title, "font-size=\"16\" text-anchor=\"middle\"");
    for (std::size_t i = 0; i < kNfCount; ++i) {
        for (std::size_t j = 0; j < kNfCount; ++j) {
            svg += "<rect x=\"" + px(x0 + cell * static_cast<double>(j)) + "\" y=\"" +
                   px(y0 + cell * static_cast<double>(i)) + "\" width=\"" + px(cell) + "\" height=\"" + px(cell) +
                   "\" fill=\"" + ramp_color(cmap->second, norm(shown[i][j])) + "\"><title>" +
                   std::string(to_string(kAllNfs[i])) + " to " + std::string(to_string(kAllNfs[j])) + ": " +
                   format_number(spec.values[i][j]) + "</title></rect>\n";
        }
    }
    for (std::size_t k = 0; k < kNfCount; ++k) {
        const double mid = cell * (static_cast<double>(k) + 0.5);
        svg += text(x0 + mid, y0 + cell * kNfCount + 16, to_string(kAllNfs[k]),
                    "font-size=\"11\" text-anchor=\"middle\"");
        svg += text(x0 - 6, y0 + mid + 4, to_string(kAllNfs[k]), "font-size=\"11\" text-anchor=\"end\"");
    }
    svg += text(x0 + cell * kNfCount / 2, y0 + cell * kNfCount + 40, "Destination NF",
                "font-size=\"12\" text-anchor=\"middle\"");
    svg += text(24, y0 + cell * kNfCount / 2, "Source NF",
                "font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 24 " +
                    px(y0 + cell * kNfCount / 2) + ")\"");

    // Six-step legend, highest value on top.
    constexpr int steps = 6;
    constexpr double bar_x = 520, swatch = 40;
    if (!spec.colorbar_label.empty()) svg += text(bar_x, y0 - 8, spec.colorbar_label, "font-size=\"11\"");
    for (int s = 0; s < steps; ++s) {
        const double t = static_cast<double>(steps - 1 - s) / (steps - 1);
        const double y = y0 + swatch * s;
        svg += "<rect x=\"" + px(bar_x) + "\" y=\"" + px(y) + "\" width=\"20\" height=\"" + px(swatch) +
               "\" fill=\"" + ramp_color(cmap->second, t) + "\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
        svg += text(bar_x + 26, y + swatch / 2 + 4, fmt("%.4g", unscale(lo + t * range)), "font-size=\"11\"");
    }
    if (spec.scale == HeatScale::Log10) {
        svg += text(bar_x, y0 + swatch * steps + 16, "log scale", "font-size=\"10\" font-style=\"italic\"");
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_histogram(const Histogram& h, std::string_view title) {
    constexpr double x0 = 70, y0 = 50, w = 530, hgt = 280;
    const double width = h.bin_width_bytes;
    double x_max = width;
    std::uint64_t y_max = 0;
    for (const auto& [bin, count] : h.bins) {
        x_max = std::max(x_max, (static_cast<double>(bin) + 1) * width);
        y_max = std::max(y_max, count);
    }
    const double y_top = y_max > 0 ? static_cast<double>(y_max) : 1.0;

    std::string svg = svg_open(640, 400);
    svg += text(x0 + w / 2, 28, title, "font-size=\"16\" text-anchor=\"middle\"");
    for (const auto& [bin, count] : h.bins) {
        const double bx = x0 + static_cast<double>(bin) * width / x_max * w;
        const double bw = std::max(1.0, width / x_max * w);
        const double bh = static_cast<double>(count) / y_top * hgt;
        svg += "<rect x=\"" + px(bx) + "\" y=\"" + px(y0 + hgt - bh) + "\" width=\"" + px(bw) + "\" height=\"" +
               px(bh) + "\" fill=\"#2a788e\"><title>" + std::to_string(bin * static_cast<std::int64_t>(width)) +
               " B: " + std::to_string(count) + "</title></rect>\n";
    }
    svg += "<line x1=\"" + px(x0) + "\" y1=\"" + px(y0 + hgt) + "\" x2=\"" + px(x0 + w) + "\" y2=\"" +
           px(y0 + hgt) + "\" stroke=\"#000000\"/>\n";
    svg += "<line x1=\"" + px(x0) + "\" y1=\"" + px(y0) + "\" x2=\"" + px(x0) + "\" y2=\"" + px(y0 + hgt) +
           "\" stroke=\"#000000\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double f = i / 5.0;
        svg += text(x0 + f * w, y0 + hgt + 16, fmt("%.0f", f * x_max), "font-size=\"11\" text-anchor=\"middle\"");
        svg += text(x0 - 6, y0 + hgt - f * hgt + 4, fmt("%.0f", f * (y_max > 0 ? y_top : 0.0)),
                    "font-size=\"11\" text-anchor=\"end\"");
    }
    svg += text(x0 + w / 2, y0 + hgt + 40, "Packet length (bytes)", "font-size=\"12\" text-anchor=\"middle\"");
    svg += text(18, y0 + hgt / 2, "Packets",
                "font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + px(y0 + hgt / 2) + ")\"");
    svg += "</svg>\n";
    return svg;
}

std::string report_json(const AnalysisResult& result, const AnalysisOptions& options) {
    const auto& m = result.snapshot.matrix;
    ordered_json doc;
    doc["format"] = "coresig-report/1";
    doc["options"] = {
        {"stddev_mode", to_string(options.stddev_mode)},
        {"scaling", to_string(options.scaling)},
        {"merge_directions", options.merge_directions},
        {"bin_width_bytes", options.bin_width},
        {"k_min", options.k_min},
        {"k_max", options.k_max},
        {"restarts", options.restarts},
        {"seed", options.seed},
        {"peak_min_separation_bins", options.peak_separation_bins},
        {"peak_min_mass_fraction", options.peak_mass_fraction},
    };
    doc["trace"] = {
        {"duration_us", m.meta().duration_us},
        {"total_packets_ingested", m.meta().total_packets_ingested},
        {"total_packets_filtered_out", m.meta().total_packets_filtered_out},
        {"core_packets", m.total_core_packets()},
        {"malformed_skipped", result.snapshot.malformed_skipped},
    };
    ordered_json nfs = ordered_json::array();
    for (NfKind nf : kAllNfs) nfs.push_back(to_string(nf));
    doc["nfs"] = nfs;

    ordered_json cells = ordered_json::array();
    for (NfKind src : kAllNfs) {
        for (NfKind dst : kAllNfs) {
            const StatsSummary s = m.cell(src, dst).finalize(options.stddev_mode);
            cells.push_back({{"src", to_string(src)},
                             {"dst", to_string(dst)},
                             {"count", s.count},
                             {"mean_len", s.mean},
                             {"max_len", s.max},
                             {"stddev_len", s.stddev}});
        }
    }
    doc["cells"] = cells;

    ordered_json hists = ordered_json::array();
    for (const auto& h : result.snapshot.histograms) {
        ordered_json bins = ordered_json::array();
        for (const auto& [bin, count] : h.bins) {
            bins.push_back({bin * static_cast<std::int64_t>(h.bin_width_bytes), count});
        }
        hists.push_back({{"peer", to_string(h.peer)},
                         {"direction", to_string(h.direction)},
                         {"bin_width_bytes", h.bin_width_bytes},
                         {"total", h.total()},
                         {"peaks", peak_count(h, options.peak_separation_bins, options.peak_mass_fraction)},
                         {"bins", bins}});
    }
    doc["histograms"] = hists;

    ordered_json clusters = ordered_json::object();
    for (const auto& outcome : result.clusters) {
        ordered_json entry;
        entry["k"] = outcome.k;
        if (!outcome.report) {
            entry["skipped"] = outcome.skipped;
        } else {
            const auto& r = *outcome.report;
            entry["inertia"] = r.inertia;
            entry["restarts_run"] = r.restarts_run;
            entry["seed"] = r.seed;
            ordered_json centroids = ordered_json::array();
            for (const auto& c : r.centroids) centroids.push_back({c[0], c[1], c[2], c[3]});
            entry["centroids"] = centroids;
            ordered_json labels = ordered_json::array();
            for (const auto& row : r.labels) labels.push_back(row);
            entry["labels"] = labels;
        }
        clusters[std::to_string(outcome.k)] = entry;
    }
    doc["clusters"] = clusters;
    return doc.dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

Manifest write_report(const AnalysisResult& result, const AnalysisOptions& options,
                      const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const auto& m = result.snapshot.matrix;

    // Render everything before touching the filesystem.
    std::map<std::string, std::string> files;
    const std::array<std::pair<Stat, std::string_view>, 4> stats = {
        std::pair{Stat::Mean, "Average packet length (bytes)"},
        std::pair{Stat::Max, "Maximum packet length (bytes)"},
        std::pair{Stat::Stddev, "Standard deviation of packet length (bytes)"},
        std::pair{Stat::Count, "Number of packets sent"},
    };
    for (const auto& [stat, title] : stats) {
        const std::string name(to_string(stat));
        ValueGrid grid = stat_grid(m, stat, options.stddev_mode);
        files["stats/" + name + ".csv"] = grid_csv(grid);
        HeatmapSpec spec;
        spec.title = std::string(title);
        spec.values = std::move(grid);
        spec.scale = stat == Stat::Count ? HeatScale::Log10 : HeatScale::Linear;
        spec.colorbar_label = stat == Stat::Count ? "packets" : "bytes";
        files["figures/" + name + ".svg"] = render_heatmap(spec);
    }
    for (const auto& outcome : result.clusters) {
        const std::string name = "k" + std::to_string(outcome.k);
        LabelGrid labels{};
        if (outcome.report) labels = outcome.report->labels;
        ValueGrid grid = label_grid(labels);
        files["clusters/" + name + ".csv"] = grid_csv(grid);
        HeatmapSpec spec;
        spec.title = "Clustering analysis: k=" + std::to_string(outcome.k);
        if (!outcome.report) spec.title += " (skipped)";
        spec.values = std::move(grid);
        spec.colorbar_label = "cluster label";
        files["figures/clusters_" + name + ".svg"] = render_heatmap(spec);
    }
    for (const auto& h : result.snapshot.histograms) {
        const std::string name = histogram_name(h);
        files["histograms/" + name + ".csv"] = histogram_csv(h);
        const std::string title = "Packet length distribution: " +
                                  std::string(h.direction == NrfDirection::SourceNRF ? "source" : "destination") +
                                  " NRF, peer " + std::string(to_string(h.peer));
        files["figures/" + name + ".svg"] = render_histogram(h, title);
    }
    files["report.json"] = report_json(result, options);

    std::error_code ec;
    for (const char* sub : {"stats", "clusters", "histograms", "figures"}) {
        fs::create_directories(out_dir / sub, ec);
        if (ec) throw IoError("cannot create '" + (out_dir / sub).string() + "': " + ec.message());
    }
    fs::remove(out_dir / "manifest.json", ec);
    if (ec) throw IoError("cannot replace '" + (out_dir / "manifest.json").string() + "': " + ec.message());

    Manifest manifest;
    for (const auto& [rel, content] : files) {
        write_file(out_dir / rel, content);
        manifest.files.push_back({rel, sha256_hex(content), content.size()});
    }

    ordered_json doc;
    doc["format"] = "coresig-manifest/1";
    ordered_json list = ordered_json::array();
    for (const auto& e : manifest.files) list.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    doc["files"] = list;
    write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
    return manifest;
}

}  // namespace coresig
