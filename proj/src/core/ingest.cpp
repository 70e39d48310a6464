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

#include "ingest.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace coresig {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string_view host_part(std::string_view token) {
    auto colon = token.find(':');
    return colon == std::string_view::npos ? token : token.substr(0, colon);
}

PacketRecord make_record(std::int64_t ts, std::string_view src, std::string_view dst, std::string_view proto,
                         std::int64_t length, std::string_view kind, const NfAddressMap& map,
                         std::size_t line_no) {
    if (ts < 0) throw ParseError(line_no, "timestamp_us must be >= 0");
    if (length < 1 || length > 65535) throw ParseError(line_no, "length_bytes must be in [1, 65535]");
    PacketRecord rec;
    rec.timestamp_us = ts;
    rec.src = resolve_endpoint(src, map, line_no);
    rec.dst = resolve_endpoint(dst, map, line_no);
    auto p = parse_proto(proto);
    if (!p) throw ParseError(line_no, "proto: expected TCP or UDP, got '" + std::string(proto) + "'");
    rec.proto = *p;
    rec.length_bytes = static_cast<std::uint32_t>(length);
    if (kind.empty()) {
        rec.kind = MsgKind::Other;
    } else {
        auto k = parse_msg_kind(kind);
        if (!k) throw ParseError(line_no, "kind: unknown message kind '" + std::string(kind) + "'");
        rec.kind = *k;
    }
    return rec;
}

}  // namespace

bool is_address(std::string_view token) {
    const std::string host(host_part(token));
    in_addr addr{};
    if (inet_pton(AF_INET, host.c_str(), &addr) != 1) return false;
    if (host.size() == token.size()) return true;
    auto port = to_int<std::uint32_t>(token.substr(host.size() + 1));
    return port && *port <= 65535;
}

void NfAddressMap::add(std::string_view address, NfKind nf) {
    if (!is_address(address)) throw ConfigError("nf map: malformed address '" + std::string(address) + "'");
    auto [it, inserted] = entries_.emplace(std::string(address), nf);
    if (!inserted) throw ConfigError("nf map: address '" + std::string(address) + "' mapped twice");
}

std::optional<NfKind> NfAddressMap::lookup(std::string_view address) const {
    if (auto it = entries_.find(std::string(address)); it != entries_.end()) return it->second;
    const auto host = host_part(address);
    if (host.size() != address.size()) {
        if (auto it = entries_.find(std::string(host)); it != entries_.end()) return it->second;
    }
    return std::nullopt;
}

NfAddressMap NfAddressMap::parse(std::istream& in) {
    NfAddressMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        auto space = view.find_first_of(" \t");
        if (space == std::string_view::npos) {
            throw ConfigError("nf map line " + std::to_string(line_no) + ": expected 'address NFNAME'");
        }
        const auto address = view.substr(0, space);
        const auto name = trim(view.substr(space));
        auto nf = parse_nf(name);
        if (!nf) throw ConfigError("nf map line " + std::to_string(line_no) + ": unknown NF '" + std::string(name) + "'");
        map.add(address, *nf);
    }
    return map;
}

NfAddressMap NfAddressMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open nf map '" + path + "'");
    return parse(in);
}

Endpoint resolve_endpoint(std::string_view token, const NfAddressMap& map, std::size_t line_no) {
    token = trim(token);
    if (token.empty()) throw ParseError(line_no, "empty endpoint");
    if (auto nf = parse_nf(token)) return Endpoint::core(*nf);
    if (is_address(token)) {
        if (auto nf = map.lookup(token)) return Endpoint::core(*nf);
        return Endpoint::external(std::string(token));
    }
    for (std::string_view ext : {"gNB", "UE", "Internet", "External"}) {
        if (iequals(token, ext)) return Endpoint::external(std::string(token));
    }
    throw ParseError(line_no, "unknown NF '" + std::string(token) + "'");
}

PacketRecord parse_record(std::string_view line, const NfAddressMap& map, std::size_t line_no) {
    line = trim(line);
    if (line.empty()) throw ParseError(line_no, "empty line");
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (fields.size() != 5 && fields.size() != 6) {
        throw ParseError(line_no, "expected 6 fields, got " + std::to_string(fields.size()));
    }
    auto ts = to_int<std::int64_t>(fields[0]);
    if (!ts) throw ParseError(line_no, "timestamp_us: not an integer '" + std::string(fields[0]) + "'");
    auto len = to_int<std::int64_t>(fields[4]);
    if (!len) throw ParseError(line_no, "length_bytes: not an integer '" + std::string(fields[4]) + "'");
    return make_record(*ts, fields[1], fields[2], fields[3], *len, fields.size() == 6 ? fields[5] : "", map,
                       line_no);
}

PacketRecord parse_json_record(std::string_view line, const NfAddressMap& map, std::size_t line_no) {
    using nlohmann::json;
    json obj;
    try {
        obj = json::parse(line.begin(), line.end());
    } catch (const json::parse_error&) {
        throw ParseError(line_no, "invalid JSON");
    }
    if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
    auto str = [&](const char* key) -> std::string {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_string()) throw ParseError(line_no, std::string(key) + ": expected a string");
        return it->get<std::string>();
    };
    auto integer = [&](const char* key) -> std::int64_t {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_number_integer()) {
            throw ParseError(line_no, std::string(key) + ": expected an integer");
        }
        return it->get<std::int64_t>();
    };
    std::string kind;
    if (auto it = obj.find("kind"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError(line_no, "kind: expected a string");
        kind = it->get<std::string>();
    }
    return make_record(integer("timestamp_us"), str("src"), str("dst"), str("proto"), integer("length_bytes"), kind,
                       map, line_no);
}

std::string format_csv_row(const PacketRecord& rec) {
    std::string out = std::to_string(rec.timestamp_us);
    out += ',';
    out += rec.src.name();
    out += ',';
    out += rec.dst.name();
    out += ',';
    out += to_string(rec.proto);
    out += ',';
    out += std::to_string(rec.length_bytes);
    out += ',';
    out += to_string(rec.kind);
    return out;
}

std::string format_json_line(const PacketRecord& rec) {
    nlohmann::ordered_json obj;
    obj["timestamp_us"] = rec.timestamp_us;
    obj["src"] = rec.src.name();
    obj["dst"] = rec.dst.name();
    obj["proto"] = to_string(rec.proto);
    obj["length_bytes"] = rec.length_bytes;
    obj["kind"] = to_string(rec.kind);
    return obj.dump();
}

FilterResult filter_core(std::vector<PacketRecord> records) {
    FilterResult out;
    out.core.reserve(records.size());
    for (auto& rec : records) {
        if (rec.src.is_core() && rec.dst.is_core() && *rec.src.nf != *rec.dst.nf) {
            out.core.push_back(std::move(rec));
        } else {
            ++out.dropped;
        }
    }
    return out;
}

CsvReadResult read_csv_trace(std::istream& in, const NfAddressMap& map, std::uint64_t max_bad_rows) {
    CsvReadResult out;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ParseError(1, "CSV header must be '" + std::string(kCsvHeader) + "'");
    std::size_t line_no = 1;
    std::optional<ParseError> first_error;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.records.push_back(parse_record(line, map, line_no));
        } catch (const ParseError& e) {
            if (!first_error) first_error = e;
            if (++out.malformed > max_bad_rows) throw *first_error;
        }
    }
    return out;
}

CsvReadResult read_csv_trace(const std::string& path, const NfAddressMap& map, std::uint64_t max_bad_rows) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trace '" + path + "'");
    return read_csv_trace(in, map, max_bad_rows);
}

TailStats tail_stream(std::istream& in, const NfAddressMap& map, Accumulator& sink) {
    TailStats stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            sink.apply(parse_json_record(line, map, line_no));
            ++stats.applied;
        } catch (const DataError&) {
            sink.note_malformed();
            ++stats.skipped;
        }
    }
    return stats;
}

}  // namespace coresig
