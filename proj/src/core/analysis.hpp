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

#include <optional>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "stats.hpp"

namespace coresig {

struct AnalysisOptions {
    int k_min = 2;
    int k_max = 7;
    int restarts = 16;
    std::uint64_t seed = 1;
    std::uint32_t bin_width = kDefaultBinWidth;
    StddevMode stddev_mode = StddevMode::Population;
    Scaling scaling = Scaling::MinMax;
    bool merge_directions = false;
    std::int64_t peak_separation_bins = kDefaultPeakSeparation;
    double peak_mass_fraction = kDefaultPeakMassFraction;

    // Throws ConfigError.
    void validate() const;
};

struct ClusterOutcome {
    int k = 0;
    std::optional<ClusterReport> report;
    std::string skipped;  // why `report` is absent
};

struct AnalysisResult {
    Snapshot snapshot;
    std::vector<FeatureRow> rows;  // raw + scaled
    std::vector<ClusterOutcome> clusters;
};

// Batch route: filter to core, build the matrix and NRF histograms.
Snapshot snapshot_from_records(std::vector<PacketRecord> records, std::uint32_t bin_width,
                               std::uint64_t malformed = 0);

// Clusters every k in range. A k larger than the number of distinct
// interaction rows (e.g. an empty trace) is recorded as skipped.
AnalysisResult analyze_snapshot(Snapshot snapshot, const AnalysisOptions& options);

}  // namespace coresig
