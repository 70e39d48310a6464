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
#include <map>
#include <vector>

#include "model.hpp"

namespace coresig {

enum class NrfDirection : std::uint8_t { SourceNRF, DestNRF };

std::string_view to_string(NrfDirection dir);

// Packet-length distribution of traffic between the NRF and one peer.
struct Histogram {
    std::uint32_t bin_width_bytes = 16;
    std::map<std::int64_t, std::uint64_t> bins;  // floor(length / width) -> count
    NfKind peer = NfKind::AMF;
    NrfDirection direction = NrfDirection::SourceNRF;

    void add(std::uint32_t length_bytes) { ++bins[length_bytes / bin_width_bytes]; }
    std::uint64_t total() const;
    bool empty() const { return bins.empty(); }

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

inline constexpr std::uint32_t kDefaultBinWidth = 16;
inline constexpr std::int64_t kDefaultPeakSeparation = 4;
inline constexpr double kDefaultPeakMassFraction = 0.05;

// Throws DataError if any record is not a core NF-NF packet.
StatsMatrix build_matrix(const std::vector<PacketRecord>& records);

// One SourceNRF histogram per peer with traffic, then one DestNRF likewise,
// each in NF order. Throws DataError on bin_width < 1.
std::vector<Histogram> nrf_histograms(const std::vector<PacketRecord>& records,
                                      std::uint32_t bin_width = kDefaultBinWidth);

// Counts local maxima holding at least `min_mass_fraction` of the total
// mass, keeping the heaviest first and discarding any within
// `min_separation_bins` of one already kept. Throws DataError when empty.
int peak_count(const Histogram& h, std::int64_t min_separation_bins = kDefaultPeakSeparation,
               double min_mass_fraction = kDefaultPeakMassFraction);

struct Snapshot {
    StatsMatrix matrix;
    std::vector<Histogram> histograms;
    std::uint64_t malformed_skipped = 0;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// Incremental accumulator fed one record at a time. Non-core records are
// counted as filtered out. Snapshots equal the batch result over all
// records applied so far.
class Accumulator {
public:
    explicit Accumulator(std::uint32_t bin_width = kDefaultBinWidth);

    void apply(const PacketRecord& rec);
    void note_malformed() { ++malformed_; }

    std::uint64_t applied() const { return matrix_.meta().total_packets_ingested; }
    std::uint64_t malformed() const { return malformed_; }
    Snapshot snapshot() const;

private:
    std::uint32_t bin_width_;
    StatsMatrix matrix_;
    std::map<std::pair<NrfDirection, NfKind>, Histogram> histograms_;
    std::uint64_t malformed_ = 0;
};

}  // namespace coresig
