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

#include "model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace coresig {

namespace {

constexpr std::array<std::string_view, kNfCount> kNfNames = {
    "NRF", "AMF", "SMF", "AUSF", "UDM", "UDR", "PCF", "NSSF", "BSF", "UPF"};

constexpr std::array<std::string_view, kMsgKindCount> kMsgKindNames = {
    "RegistrationPut", "HeartbeatPatch", "Http204NoContent", "HttpResponseBody",
    "SubscriptionPost", "NotificationPost", "PolicyAssocPost", "SmContextPost",
    "SessionModification", "PfcpRequest", "PfcpResponse", "PfcpHeartbeat",
    "TcpAck", "Other"};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::toupper(static_cast<unsigned char>(x)) ==
                      std::toupper(static_cast<unsigned char>(y));
           });
}

}  // namespace

ParseError::ParseError(std::size_t line_no, std::string reason)
    : DataError("line " + std::to_string(line_no) + ": " + reason),
      line_no_(line_no),
      reason_(std::move(reason)) {}

std::string_view to_string(NfKind nf) { return kNfNames[index_of(nf)]; }

std::optional<NfKind> parse_nf(std::string_view text) {
    for (std::size_t i = 0; i < kNfCount; ++i) {
        if (iequals(text, kNfNames[i])) return kAllNfs[i];
    }
    return std::nullopt;
}

std::string_view to_string(MsgKind kind) { return kMsgKindNames[static_cast<std::size_t>(kind)]; }

std::optional<MsgKind> parse_msg_kind(std::string_view text) {
    for (std::size_t i = 0; i < kMsgKindCount; ++i) {
        if (iequals(text, kMsgKindNames[i])) return static_cast<MsgKind>(i);
    }
    return std::nullopt;
}

bool is_pfcp(MsgKind kind) {
    return kind == MsgKind::PfcpRequest || kind == MsgKind::PfcpResponse ||
           kind == MsgKind::PfcpHeartbeat;
}

std::string_view to_string(TransportProto proto) {
    return proto == TransportProto::TCP ? "TCP" : "UDP";
}

std::optional<TransportProto> parse_proto(std::string_view text) {
    if (iequals(text, "TCP")) return TransportProto::TCP;
    if (iequals(text, "UDP")) return TransportProto::UDP;
    return std::nullopt;
}

std::string Endpoint::name() const {
    if (nf) return std::string(to_string(*nf));
    return label.empty() ? std::string("EXTERNAL") : label;
}

void validate(const PacketRecord& rec) {
    if (rec.timestamp_us < 0) throw DataError("timestamp_us must be >= 0");
    if (rec.length_bytes < 1) throw DataError("length_bytes must be >= 1");
}

std::string_view to_string(StddevMode mode) {
    return mode == StddevMode::Population ? "population" : "sample";
}

void InteractionStats::update(std::int64_t length_bytes) {
    if (length_bytes < 1) {
        throw DataError("packet length must be >= 1, got " + std::to_string(length_bytes));
    }
    if (length_bytes > static_cast<std::int64_t>(UINT32_MAX)) {
        throw DataError("packet length out of range: " + std::to_string(length_bytes));
    }
    const double x = static_cast<double>(length_bytes);
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
    max_ = std::max(max_, static_cast<std::uint32_t>(length_bytes));
}

void InteractionStats::merge(const InteractionStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
    max_ = std::max(max_, other.max_);
}

StatsSummary InteractionStats::finalize(StddevMode mode) const {
    StatsSummary out;
    if (count_ == 0) return out;
    out.empty = false;
    out.count = count_;
    out.mean = mean_;
    out.max = max_;
    const double m2 = std::max(0.0, m2_);
    if (mode == StddevMode::Population) {
        out.stddev = std::sqrt(m2 / static_cast<double>(count_));
    } else {
        out.stddev = count_ > 1 ? std::sqrt(m2 / static_cast<double>(count_ - 1)) : 0.0;
    }
    return out;
}

StatsSummary finalize_stats(const InteractionStats& s, StddevMode mode) { return s.finalize(mode); }

InteractionStats update_stats(InteractionStats s, std::int64_t length_bytes) {
    s.update(length_bytes);
    return s;
}

void StatsMatrix::add(NfKind src, NfKind dst, std::int64_t length_bytes) {
    if (src == dst) {
        throw DataError("self-interaction " + std::string(to_string(src)) + " is not a valid cell");
    }
    cells_[index_of(src)][index_of(dst)].update(length_bytes);
}

std::uint64_t StatsMatrix::total_core_packets() const {
    std::uint64_t total = 0;
    for (const auto& row : cells_) {
        for (const auto& c : row) total += c.count();
    }
    return total;
}

}  // namespace coresig
