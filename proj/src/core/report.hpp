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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"

namespace coresig {

using ValueGrid = std::vector<std::vector<double>>;

enum class Stat : std::uint8_t { Mean, Max, Stddev, Count };
enum class HeatScale : std::uint8_t { Linear, Log10 };

std::string_view to_string(Stat stat);

ValueGrid stat_grid(const StatsMatrix& m, Stat stat, StddevMode mode = StddevMode::Population);
ValueGrid label_grid(const LabelGrid& labels);

// 9 significant digits.
std::string format_number(double v);

// Header `src,NRF,AMF,...`; one row per source NF.
std::string grid_csv(const ValueGrid& grid);
// Throws DataError on shape or number errors.
ValueGrid parse_grid_csv(std::string_view text);

std::string histogram_csv(const Histogram& h);
// Accepts the `bin_start,count` layout written by histogram_csv.
Histogram parse_histogram_csv(std::string_view text, std::uint32_t bin_width);

struct HeatmapSpec {
    std::string title;
    ValueGrid values;  // must be 10x10, rows = source NF
    HeatScale scale = HeatScale::Linear;
    std::string colormap = "viridis";
    std::string colorbar_label;
};

// Deterministic SVG. Throws DataError on a non-10x10 grid, negative or
// non-finite values under Log10, or an unknown colormap.
std::string render_heatmap(const HeatmapSpec& spec);
// Empty histograms render axes only.
std::string render_histogram(const Histogram& h, std::string_view title);

std::string report_json(const AnalysisResult& result, const AnalysisOptions& options);

std::string sha256_hex(std::string_view data);

struct ManifestEntry {
    std::string path;  // relative, '/' separated
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct Manifest {
    std::vector<ManifestEntry> files;
};

// Writes stats/, clusters/, histograms/, figures/, report.json and finally
// manifest.json. Throws IoError before writing the manifest if any
// artifact cannot be written.
Manifest write_report(const AnalysisResult& result, const AnalysisOptions& options,
                      const std::filesystem::path& out_dir);

}  // namespace coresig
