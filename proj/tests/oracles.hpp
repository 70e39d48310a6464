// Independent reference computations used as test oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "cluster.hpp"

namespace oracle {

struct Batch {
    double mean = 0;
    double max = 0;
    double min = 0;
    double pop_stddev = 0;
    double sample_stddev = 0;
};

// Classic two-pass: mean first, then the sum of squared deviations.
inline Batch two_pass(const std::vector<std::int64_t>& xs) {
    Batch b;
    if (xs.empty()) return b;
    const double n = static_cast<double>(xs.size());
    long double sum = 0;
    for (auto x : xs) sum += x;
    b.mean = static_cast<double>(sum / n);
    long double ss = 0;
    for (auto x : xs) ss += (x - static_cast<long double>(b.mean)) * (x - static_cast<long double>(b.mean));
    b.pop_stddev = static_cast<double>(std::sqrt(ss / n));
    b.sample_stddev = xs.size() > 1 ? static_cast<double>(std::sqrt(ss / (n - 1))) : 0.0;
    b.max = static_cast<double>(*std::max_element(xs.begin(), xs.end()));
    b.min = static_cast<double>(*std::min_element(xs.begin(), xs.end()));
    return b;
}

inline double rel_err(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

// Optimal k-partition inertia by enumerating every assignment of points to
// k non-empty groups (restricted growth strings, so each partition once).
inline double best_partition_inertia(const std::vector<coresig::Vec4>& pts, int k) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> assign(n, 0);
    double best = std::numeric_limits<double>::infinity();
    auto cost = [&] {
        double total = 0;
        for (int c = 0; c < k; ++c) {
            coresig::Vec4 mean{};
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                ++count;
                for (int d = 0; d < 4; ++d) mean[d] += pts[i][d];
            }
            if (count == 0) return std::numeric_limits<double>::infinity();
            for (double& v : mean) v /= count;
            for (int i = 0; i < n; ++i) {
                if (assign[i] == c) total += coresig::squared_distance(pts[i], mean);
            }
        }
        return total;
    };
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (i == n) {
            if (used == k) best = std::min(best, cost());
            return;
        }
        for (int c = 0; c <= std::min(used, k - 1); ++c) {
            assign[i] = c;
            self(self, i + 1, std::max(used, c + 1));
        }
    };
    rec(rec, 0, 0);
    return best;
}

}  // namespace oracle
