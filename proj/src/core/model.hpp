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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coresig {

// Errors surfaced by the core. The C API maps each onto a status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t line_no, std::string reason);

    std::size_t line_no() const { return line_no_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t line_no_;
    std::string reason_;
};

// The ten core network functions, in matrix order.
enum class NfKind : std::uint8_t { NRF, AMF, SMF, AUSF, UDM, UDR, PCF, NSSF, BSF, UPF };

inline constexpr std::size_t kNfCount = 10;

inline constexpr std::array<NfKind, kNfCount> kAllNfs = {
    NfKind::NRF, NfKind::AMF, NfKind::SMF,  NfKind::AUSF, NfKind::UDM,
    NfKind::UDR, NfKind::PCF, NfKind::NSSF, NfKind::BSF,  NfKind::UPF};

constexpr std::size_t index_of(NfKind nf) { return static_cast<std::size_t>(nf); }

std::string_view to_string(NfKind nf);
// Case-insensitive.
std::optional<NfKind> parse_nf(std::string_view text);

enum class MsgKind : std::uint8_t {
    RegistrationPut,
    HeartbeatPatch,
    Http204NoContent,
    HttpResponseBody,
    SubscriptionPost,
    NotificationPost,
    PolicyAssocPost,
    SmContextPost,
    SessionModification,
    PfcpRequest,
    PfcpResponse,
    PfcpHeartbeat,
    TcpAck,
    Other,
};

inline constexpr std::size_t kMsgKindCount = 14;

std::string_view to_string(MsgKind kind);
std::optional<MsgKind> parse_msg_kind(std::string_view text);
bool is_pfcp(MsgKind kind);

enum class TransportProto : std::uint8_t { TCP, UDP };

std::string_view to_string(TransportProto proto);
std::optional<TransportProto> parse_proto(std::string_view text);

// A packet endpoint: either a core NF or something outside the core
// (gNB, UE, Internet, unmapped address). `label` keeps the original token.
struct Endpoint {
    std::optional<NfKind> nf;
    std::string label;

    static Endpoint core(NfKind kind) { return Endpoint{kind, {}}; }
    static Endpoint external(std::string label) { return Endpoint{std::nullopt, std::move(label)}; }

    bool is_core() const { return nf.has_value(); }
    std::string name() const;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct PacketRecord {
    std::int64_t timestamp_us = 0;
    Endpoint src;
    Endpoint dst;
    TransportProto proto = TransportProto::TCP;
    std::uint32_t length_bytes = 1;
    MsgKind kind = MsgKind::Other;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// Throws DataError when timestamp or length is out of range.
void validate(const PacketRecord& rec);

// Ordered (directed) NF pair.
struct InteractionKey {
    NfKind src;
    NfKind dst;

    friend bool operator==(const InteractionKey&, const InteractionKey&) = default;
    friend auto operator<=>(const InteractionKey&, const InteractionKey&) = default;
};

enum class StddevMode : std::uint8_t { Population, Sample };

std::string_view to_string(StddevMode mode);

struct StatsSummary {
    std::uint64_t count = 0;
    double mean = 0.0;
    std::uint32_t max = 0;
    double stddev = 0.0;
    bool empty = true;
};

// One-pass aggregate over packet lengths (Welford), mergeable (Chan et al.).
class InteractionStats {
public:
    // Throws DataError on length_bytes < 1.
    void update(std::int64_t length_bytes);
    void merge(const InteractionStats& other);

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    std::uint32_t max() const { return max_; }
    double m2() const { return m2_; }

    StatsSummary finalize(StddevMode mode = StddevMode::Population) const;

    friend bool operator==(const InteractionStats&, const InteractionStats&) = default;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    std::uint32_t max_ = 0;
    double m2_ = 0.0;
};

StatsSummary finalize_stats(const InteractionStats& s, StddevMode mode = StddevMode::Population);
InteractionStats update_stats(InteractionStats s, std::int64_t length_bytes);

struct TraceMeta {
    std::int64_t duration_us = 0;
    std::uint64_t total_packets_ingested = 0;
    std::uint64_t total_packets_filtered_out = 0;

    friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

// 10x10 directed grid; diagonal cells stay at count 0.
class StatsMatrix {
public:
    const InteractionStats& cell(NfKind src, NfKind dst) const {
        return cells_[index_of(src)][index_of(dst)];
    }
    const InteractionStats& cell(InteractionKey key) const { return cell(key.src, key.dst); }

    // Throws DataError for a self-interaction.
    void add(NfKind src, NfKind dst, std::int64_t length_bytes);

    TraceMeta& meta() { return meta_; }
    const TraceMeta& meta() const { return meta_; }

    std::uint64_t total_core_packets() const;

    friend bool operator==(const StatsMatrix&, const StatsMatrix&) = default;

private:
    std::array<std::array<InteractionStats, kNfCount>, kNfCount> cells_{};
    TraceMeta meta_;
};

}  // namespace coresig
