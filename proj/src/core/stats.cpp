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

#include "stats.hpp"

#include <algorithm>
#include <cstdlib>

namespace coresig {

std::string_view to_string(NrfDirection dir) {
    return dir == NrfDirection::SourceNRF ? "source" : "dest";
}

std::uint64_t Histogram::total() const {
    std::uint64_t sum = 0;
    for (const auto& [bin, count] : bins) sum += count;
    return sum;
}

StatsMatrix build_matrix(const std::vector<PacketRecord>& records) {
    StatsMatrix m;
    for (const auto& rec : records) {
        if (!rec.src.is_core() || !rec.dst.is_core()) {
            throw DataError("build_matrix: record " + rec.src.name() + "->" + rec.dst.name() +
                            " is not a core interaction");
        }
        m.add(*rec.src.nf, *rec.dst.nf, rec.length_bytes);
    }
    return m;
}

std::vector<Histogram> nrf_histograms(const std::vector<PacketRecord>& records, std::uint32_t bin_width) {
    if (bin_width < 1) throw DataError("histogram bin width must be >= 1");
    std::map<std::pair<NrfDirection, NfKind>, Histogram> by_peer;
    for (const auto& rec : records) {
        if (!rec.src.is_core() || !rec.dst.is_core() || *rec.src.nf == *rec.dst.nf) continue;
        NrfDirection dir;
        NfKind peer;
        if (*rec.src.nf == NfKind::NRF) {
            dir = NrfDirection::SourceNRF;
            peer = *rec.dst.nf;
        } else if (*rec.dst.nf == NfKind::NRF) {
            dir = NrfDirection::DestNRF;
            peer = *rec.src.nf;
        } else {
            continue;
        }
        auto [it, inserted] = by_peer.try_emplace({dir, peer});
        if (inserted) it->second = Histogram{bin_width, {}, peer, dir};
        it->second.add(rec.length_bytes);
    }
    std::vector<Histogram> out;
    out.reserve(by_peer.size());
    for (auto& [key, h] : by_peer) out.push_back(std::move(h));
    return out;
}

int peak_count(const Histogram& h, std::int64_t min_separation_bins, double min_mass_fraction) {
    if (h.empty()) throw DataError("peak_count: histogram is empty");
    const std::int64_t lo = h.bins.begin()->first;
    const std::int64_t hi = h.bins.rbegin()->first;
    std::vector<std::uint64_t> dense(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto& [bin, count] : h.bins) dense[static_cast<std::size_t>(bin - lo)] = count;

    // Local maxima; a plateau counts once, at its first bin.
    struct Peak {
        std::int64_t bin;
        std::uint64_t mass;
    };
    std::vector<Peak> candidates;
    const double threshold = min_mass_fraction * static_cast<double>(h.total());
    const std::size_t n = dense.size();
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && dense[j + 1] == dense[i]) ++j;
        const std::uint64_t left = i == 0 ? 0 : dense[i - 1];
        const std::uint64_t right = j + 1 == n ? 0 : dense[j + 1];
        if (dense[i] > 0 && dense[i] > left && dense[i] > right &&
            static_cast<double>(dense[i]) >= threshold) {
            candidates.push_back({lo + static_cast<std::int64_t>(i), dense[i]});
        }
        i = j + 1;
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.mass > b.mass; });
    std::vector<std::int64_t> kept;
    for (const auto& p : candidates) {
        const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::int64_t k) {
            return std::abs(k - p.bin) >= min_separation_bins;
        });
        if (clear) kept.push_back(p.bin);
    }
    return static_cast<int>(kept.size());
}

Accumulator::Accumulator(std::uint32_t bin_width) : bin_width_(bin_width) {
    if (bin_width < 1) throw DataError("histogram bin width must be >= 1");
}

void Accumulator::apply(const PacketRecord& rec) {
    auto& meta = matrix_.meta();
    ++meta.total_packets_ingested;
    meta.duration_us = std::max(meta.duration_us, rec.timestamp_us);
    if (!rec.src.is_core() || !rec.dst.is_core() || *rec.src.nf == *rec.dst.nf) {
        ++meta.total_packets_filtered_out;
        return;
    }
    const NfKind src = *rec.src.nf;
    const NfKind dst = *rec.dst.nf;
    matrix_.add(src, dst, rec.length_bytes);
    if (src == NfKind::NRF || dst == NfKind::NRF) {
        const NrfDirection dir = src == NfKind::NRF ? NrfDirection::SourceNRF : NrfDirection::DestNRF;
        const NfKind peer = src == NfKind::NRF ? dst : src;
        auto [it, inserted] = histograms_.try_emplace({dir, peer});
        if (inserted) it->second = Histogram{bin_width_, {}, peer, dir};
        it->second.add(rec.length_bytes);
    }
}

Snapshot Accumulator::snapshot() const {
    Snapshot s;
    s.matrix = matrix_;
    s.histograms.reserve(histograms_.size());
    for (const auto& [key, h] : histograms_) s.histograms.push_back(h);
    s.malformed_skipped = malformed_;
    return s;
}

}  // namespace coresig
