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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "model.hpp"

namespace coresig {

using Vec4 = std::array<double, 4>;

// Feature order: mean length, max length, stddev of length, packet count.
inline constexpr std::size_t kCountFeature = 3;

struct FeatureRow {
    InteractionKey key;
    Vec4 features{};  // raw
    Vec4 scaled{};
};

enum class Scaling : std::uint8_t { MinMax, ZScore };

std::string_view to_string(Scaling s);

// 100 rows in (src, dst) NF order, diagonal included as zeros. With
// `merge_directions`, both directions of a pair carry the merged statistics.
std::vector<FeatureRow> feature_rows(const StatsMatrix& m, StddevMode mode = StddevMode::Population,
                                     bool merge_directions = false);

// Per-column scaling. Min-max maps to [0, 1]; a zero-range column maps to 0.
std::vector<Vec4> scale_columns(std::span<const Vec4> columns, Scaling scaling = Scaling::MinMax);
void scale_features(std::vector<FeatureRow>& rows, Scaling scaling = Scaling::MinMax);

struct KMeansOptions {
    int max_iterations = 300;
    double tolerance = 1e-9;  // max centroid shift
};

struct KMeansResult {
    int k = 0;
    std::vector<Vec4> centroids;
    std::vector<int> labels;
    double inertia = 0.0;
    int restarts_run = 0;
    int best_restart = 0;
    // Inertia after every Lloyd iteration, per restart.
    std::vector<std::vector<double>> inertia_history;
};

// Multi-restart Lloyd. Each restart seeds from k distinct points drawn
// uniformly; the lowest-inertia restart wins (ties: lowest index). Labels are
// canonicalized by ascending centroid count feature. Throws DataError when k
// is outside [2, distinct points] or restarts < 1.
KMeansResult kmeans(std::span<const Vec4> points, int k, int restarts, std::uint64_t seed,
                    const KMeansOptions& options = {});

std::size_t distinct_points(std::span<const Vec4> points);

double squared_distance(const Vec4& a, const Vec4& b);

using LabelGrid = std::array<std::array<int, kNfCount>, kNfCount>;

struct ClusterReport {
    int k = 0;
    std::vector<Vec4> centroids;  // scaled space
    LabelGrid labels{};
    double inertia = 0.0;
    int restarts_run = 0;
    std::uint64_t seed = 0;
};

struct CharacterizeOptions {
    int k_min = 2;
    int k_max = 7;
    int restarts = 16;
    std::uint64_t seed = 1;
    Scaling scaling = Scaling::MinMax;
    StddevMode stddev_mode = StddevMode::Population;
    bool merge_directions = false;
};

ClusterReport cluster_rows(const std::vector<FeatureRow>& scaled_rows, int k, int restarts, std::uint64_t seed);

// One report per k in [k_min, k_max]. Throws if any k is infeasible.
std::vector<ClusterReport> characterize(const StatsMatrix& m, const CharacterizeOptions& options = {});

}  // namespace coresig
