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
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace coresig {

inline constexpr std::string_view kCsvHeader = "timestamp_us,src,dst,proto,length_bytes,kind";

// Endpoint address ("10.0.0.7" or "10.0.0.7:7777") -> NF.
class NfAddressMap {
public:
    // Throws ConfigError if the address is malformed or already mapped.
    void add(std::string_view address, NfKind nf);
    // Exact "addr:port" match first, then the bare address.
    std::optional<NfKind> lookup(std::string_view address) const;
    std::size_t size() const { return entries_.size(); }

    // Lines of `address[:port] NFNAME`; '#' starts a comment.
    static NfAddressMap parse(std::istream& in);
    static NfAddressMap load(const std::string& path);

private:
    std::unordered_map<std::string, NfKind> entries_;
};

// True for dotted-quad IPv4 with an optional ":port".
bool is_address(std::string_view token);

// NF name (any case), external marker (gNB, UE, Internet, External) or
// address. Unknown names are an error; unknown addresses are External.
Endpoint resolve_endpoint(std::string_view token, const NfAddressMap& map, std::size_t line_no);

// One CSV data row (no header). `kind` may be empty or missing (-> Other).
PacketRecord parse_record(std::string_view line, const NfAddressMap& map, std::size_t line_no = 0);
// One JSON object per line with the CSV field names.
PacketRecord parse_json_record(std::string_view line, const NfAddressMap& map, std::size_t line_no = 0);

std::string format_csv_row(const PacketRecord& rec);
std::string format_json_line(const PacketRecord& rec);

struct FilterResult {
    std::vector<PacketRecord> core;
    std::uint64_t dropped = 0;
};

// Keeps records whose endpoints are distinct core NFs, in input order.
FilterResult filter_core(std::vector<PacketRecord> records);

struct CsvReadResult {
    std::vector<PacketRecord> records;
    std::uint64_t malformed = 0;
};

// Reads a CSV trace; the first line must equal kCsvHeader. Rows that fail to
// parse are counted; once more than `max_bad_rows` fail, the first error is
// rethrown.
CsvReadResult read_csv_trace(std::istream& in, const NfAddressMap& map, std::uint64_t max_bad_rows = 0);
CsvReadResult read_csv_trace(const std::string& path, const NfAddressMap& map, std::uint64_t max_bad_rows = 0);

struct TailStats {
    std::uint64_t applied = 0;
    std::uint64_t skipped = 0;
};

// Applies each JSON line to `sink` in arrival order until EOF. Malformed
// lines are counted on the accumulator and skipped; blank lines are ignored.
TailStats tail_stream(std::istream& in, const NfAddressMap& map, Accumulator& sink);

}  // namespace coresig
