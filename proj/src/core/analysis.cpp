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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ingest.hpp"

namespace coresig {

void AnalysisOptions::validate() const {
    if (k_min < 2 || k_max < k_min) {
        throw ConfigError("k range must satisfy 2 <= k_min <= k_max, got " + std::to_string(k_min) + ".." +
                          std::to_string(k_max));
    }
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    if (bin_width < 1) throw ConfigError("bin width must be >= 1");
    if (peak_separation_bins < 1) throw ConfigError("peak separation must be >= 1 bin");
    if (!(peak_mass_fraction >= 0.0 && peak_mass_fraction <= 1.0)) {
        throw ConfigError("peak mass fraction must be in [0, 1]");
    }
}

Snapshot snapshot_from_records(std::vector<PacketRecord> records, std::uint32_t bin_width,
                               std::uint64_t malformed) {
    TraceMeta meta;
    meta.total_packets_ingested = records.size();
    for (const auto& rec : records) meta.duration_us = std::max(meta.duration_us, rec.timestamp_us);
    FilterResult filtered = filter_core(std::move(records));
    meta.total_packets_filtered_out = filtered.dropped;

    Snapshot s;
    s.matrix = build_matrix(filtered.core);
    s.matrix.meta() = meta;
    s.histograms = nrf_histograms(filtered.core, bin_width);
    s.malformed_skipped = malformed;
    return s;
}

AnalysisResult analyze_snapshot(Snapshot snapshot, const AnalysisOptions& options) {
    options.validate();
    AnalysisResult result;
    result.rows = feature_rows(snapshot.matrix, options.stddev_mode, options.merge_directions);
    scale_features(result.rows, options.scaling);

    std::vector<Vec4> scaled;
    scaled.reserve(result.rows.size());
    for (const auto& r : result.rows) scaled.push_back(r.scaled);
    const std::size_t distinct = distinct_points(scaled);

    for (int k = options.k_min; k <= options.k_max; ++k) {
        ClusterOutcome outcome;
        outcome.k = k;
        if (static_cast<std::size_t>(k) > distinct) {
            outcome.skipped = "k=" + std::to_string(k) + " exceeds the " + std::to_string(distinct) +
                              " distinct interaction rows";
        } else {
            outcome.report = cluster_rows(result.rows, k, options.restarts, options.seed);
        }
        result.clusters.push_back(std::move(outcome));
    }
    result.snapshot = std::move(snapshot);
    return result;
}

}  // namespace coresig
