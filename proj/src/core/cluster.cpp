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

#include "cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rng.hpp"

namespace coresig {

namespace {

constexpr std::uint64_t kFamKMeansInit = 0x6B6D;

struct Lloyd {
    std::vector<Vec4> centroids;
    std::vector<int> labels;
    double inertia = 0.0;
    std::vector<double> history;
};

int nearest(const Vec4& p, const std::vector<Vec4>& centroids) {
    int best = 0;
    double best_d = squared_distance(p, centroids[0]);
    for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
        const double d = squared_distance(p, centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Moves the point farthest from its centroid (with its duplicates) into each
// empty cluster.
void repair_empty(std::span<const Vec4> points, std::vector<int>& labels, std::vector<Vec4>& centroids) {
    const int k = static_cast<int>(centroids.size());
    for (int c = 0; c < k; ++c) {
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) continue;
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = squared_distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        const Vec4 seized = points[far];
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i] == seized) labels[i] = c;
        }
        centroids[static_cast<std::size_t>(c)] = seized;
    }
}

double total_inertia(std::span<const Vec4> points, const std::vector<int>& labels, const std::vector<Vec4>& centroids) {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum += squared_distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    }
    return sum;
}

Lloyd run_lloyd(std::span<const Vec4> points, std::vector<Vec4> centroids, const KMeansOptions& options) {
    const std::size_t k = centroids.size();
    Lloyd out;
    out.labels.assign(points.size(), 0);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t i = 0; i < points.size(); ++i) out.labels[i] = nearest(points[i], centroids);
        repair_empty(points, out.labels, centroids);

        std::vector<Vec4> updated(k, Vec4{});
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = static_cast<std::size_t>(out.labels[i]);
            for (std::size_t d = 0; d < 4; ++d) updated[c][d] += points[i][d];
            ++sizes[c];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t d = 0; d < 4; ++d) updated[c][d] /= static_cast<double>(sizes[c]);
            shift = std::max(shift, std::sqrt(squared_distance(updated[c], centroids[c])));
        }
        centroids = std::move(updated);
        out.history.push_back(total_inertia(points, out.labels, centroids));
        if (shift < options.tolerance) break;
    }
    out.centroids = std::move(centroids);
    out.inertia = out.history.empty() ? 0.0 : out.history.back();
    return out;
}

}  // namespace

std::string_view to_string(Scaling s) { return s == Scaling::MinMax ? "minmax" : "zscore"; }

double squared_distance(const Vec4& a, const Vec4& b) {
    double sum = 0.0;
    for (std::size_t d = 0; d < 4; ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

std::size_t distinct_points(std::span<const Vec4> points) {
    std::set<Vec4> unique(points.begin(), points.end());
    return unique.size();
}

std::vector<FeatureRow> feature_rows(const StatsMatrix& m, StddevMode mode, bool merge_directions) {
    std::vector<FeatureRow> rows;
    rows.reserve(kNfCount * kNfCount);
    for (NfKind src : kAllNfs) {
        for (NfKind dst : kAllNfs) {
            InteractionStats stats = m.cell(src, dst);
            if (merge_directions && src != dst) {
                // Merge in NF order so both directions get bit-identical features.
                const NfKind lo = std::min(src, dst);
                const NfKind hi = std::max(src, dst);
                stats = m.cell(lo, hi);
                stats.merge(m.cell(hi, lo));
            }
            const StatsSummary s = stats.finalize(mode);
            FeatureRow row;
            row.key = {src, dst};
            row.features = {s.mean, static_cast<double>(s.max), s.stddev, static_cast<double>(s.count)};
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<Vec4> scale_columns(std::span<const Vec4> columns, Scaling scaling) {
    std::vector<Vec4> out(columns.begin(), columns.end());
    if (columns.empty()) return out;
    for (std::size_t d = 0; d < 4; ++d) {
        if (scaling == Scaling::MinMax) {
            double lo = columns[0][d];
            double hi = columns[0][d];
            for (const auto& v : columns) {
                lo = std::min(lo, v[d]);
                hi = std::max(hi, v[d]);
            }
            const double range = hi - lo;
            for (auto& v : out) v[d] = range > 0.0 ? (v[d] - lo) / range : 0.0;
        } else {
            double mean = 0.0;
            for (const auto& v : columns) mean += v[d];
            mean /= static_cast<double>(columns.size());
            double var = 0.0;
            for (const auto& v : columns) var += (v[d] - mean) * (v[d] - mean);
            const double sd = std::sqrt(var / static_cast<double>(columns.size()));
            for (auto& v : out) v[d] = sd > 0.0 ? (v[d] - mean) / sd : 0.0;
        }
    }
    return out;
}

void scale_features(std::vector<FeatureRow>& rows, Scaling scaling) {
    std::vector<Vec4> raw;
    raw.reserve(rows.size());
    for (const auto& r : rows) raw.push_back(r.features);
    const auto scaled = scale_columns(raw, scaling);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].scaled = scaled[i];
}

KMeansResult kmeans(std::span<const Vec4> points, int k, int restarts, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (restarts < 1) throw DataError("kmeans: restarts must be >= 1");
    std::vector<Vec4> unique;
    {
        std::set<Vec4> seen;
        for (const auto& p : points) {
            if (seen.insert(p).second) unique.push_back(p);
        }
    }
    if (k < 2 || static_cast<std::size_t>(k) > unique.size()) {
        throw DataError("kmeans: k=" + std::to_string(k) + " must be in [2, " + std::to_string(unique.size()) +
                        "] (distinct points: " + std::to_string(unique.size()) + ")");
    }

    KMeansResult best;
    best.k = k;
    best.restarts_run = restarts;
    bool have_best = false;
    for (int r = 0; r < restarts; ++r) {
        auto rng = KeyedRng::derive(seed, kFamKMeansInit, static_cast<std::uint64_t>(r));
        std::vector<std::size_t> order(unique.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<Vec4> init;
        for (int c = 0; c < k; ++c) {
            const auto pick = static_cast<std::size_t>(
                rng.uniform_int(c, static_cast<std::int64_t>(order.size()) - 1));
            std::swap(order[static_cast<std::size_t>(c)], order[pick]);
            init.push_back(unique[order[static_cast<std::size_t>(c)]]);
        }
        Lloyd run = run_lloyd(points, std::move(init), options);
        best.inertia_history.push_back(run.history);
        if (!have_best || run.inertia < best.inertia) {
            have_best = true;
            best.inertia = run.inertia;
            best.centroids = std::move(run.centroids);
            best.labels = std::move(run.labels);
            best.best_restart = r;
        }
    }

    // Canonical label order: ascending count feature, then the others.
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const Vec4& ca = best.centroids[static_cast<std::size_t>(a)];
        const Vec4& cb = best.centroids[static_cast<std::size_t>(b)];
        if (ca[kCountFeature] != cb[kCountFeature]) return ca[kCountFeature] < cb[kCountFeature];
        return ca < cb;
    });
    std::vector<int> relabel(static_cast<std::size_t>(k));
    std::vector<Vec4> centroids(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        relabel[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
        centroids[static_cast<std::size_t>(i)] = best.centroids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }
    for (int& label : best.labels) label = relabel[static_cast<std::size_t>(label)];
    best.centroids = std::move(centroids);
    return best;
}

ClusterReport cluster_rows(const std::vector<FeatureRow>& scaled_rows, int k, int restarts, std::uint64_t seed) {
    if (scaled_rows.size() != kNfCount * kNfCount) throw DataError("cluster_rows: expected 100 feature rows");
    std::vector<Vec4> points;
    points.reserve(scaled_rows.size());
    for (const auto& r : scaled_rows) points.push_back(r.scaled);
    const KMeansResult res = kmeans(points, k, restarts, seed);
    ClusterReport report;
    report.k = k;
    report.centroids = res.centroids;
    report.inertia = res.inertia;
    report.restarts_run = res.restarts_run;
    report.seed = seed;
    for (std::size_t i = 0; i < scaled_rows.size(); ++i) {
        const auto& key = scaled_rows[i].key;
        report.labels[index_of(key.src)][index_of(key.dst)] = res.labels[i];
    }
    return report;
}

std::vector<ClusterReport> characterize(const StatsMatrix& m, const CharacterizeOptions& options) {
    if (options.k_min < 2 || options.k_max < options.k_min) {
        throw DataError("characterize: invalid k range " + std::to_string(options.k_min) + ".." +
                        std::to_string(options.k_max));
    }
    auto rows = feature_rows(m, options.stddev_mode, options.merge_directions);
    scale_features(rows, options.scaling);
    std::vector<ClusterReport> reports;
    for (int k = options.k_min; k <= options.k_max; ++k) {
        reports.push_back(cluster_rows(rows, k, options.restarts, options.seed));
    }
    return reports;
}

}  // namespace coresig
