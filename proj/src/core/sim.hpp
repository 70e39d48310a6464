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
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace coresig {

// Packet-length law for one message role.
class SizeModel {
public:
    enum class Kind : std::uint8_t { Fixed, Uniform, LogNormal };

    static SizeModel fixed(std::uint32_t bytes);
    static SizeModel uniform(std::uint32_t lo, std::uint32_t hi);
    // exp(N(mu, sigma)) clamped below at min_clamp.
    static SizeModel log_normal(double mu, double sigma, std::uint32_t min_clamp);

    Kind kind() const { return kind_; }
    double param(std::size_t i) const { return params_[i]; }

    // Always in [1, 65535].
    std::uint32_t sample(KeyedRng& rng) const;
    // Throws ConfigError.
    void validate(std::string_view role) const;

private:
    Kind kind_ = Kind::Fixed;
    std::array<double, 3> params_{1.0, 0.0, 0.0};
};

// Message roles with their own size law. HTTP responses are split by role
// because the same MsgKind (HttpResponseBody) carries very different bodies.
enum class SizeRole : std::uint8_t {
    RegistrationPut,
    RegistrationResponse,
    HeartbeatPatch,
    Heartbeat204,
    SubscriptionPost,
    SubscriptionResponse,
    NotificationPost,
    NotificationReply,
    PolicyAssocPost,
    PolicyAssocExtra,
    PolicyDataQuery,
    PolicyData,
    SmContextPost,
    SmContextResponse,
    SessionModification,
    SessionModificationResponse,
    PfcpSessionRequest,
    PfcpSessionResponse,
    PfcpModificationRequest,
    PfcpModificationResponse,
    PfcpHeartbeat,
    AuthRequest,
    AuthResponse,
    AuthVectorRequest,
    AuthVectorResponse,
    AuthSubscriptionQuery,
    AuthSubscriptionData,
    AuthConfirm,
    AuthConfirmResponse,
    UecmRegistration,
    UecmResponse,
    SdmGet,
    SdmData,
    NssfQuery,
    NssfResponse,
    SmDataGet,
    SmData,
    SmPolicyCreate,
    SmPolicy,
    BindingCreate,
    BindingResponse,
};

inline constexpr std::size_t kSizeRoleCount = 41;

std::string_view to_string(SizeRole role);
std::optional<SizeRole> parse_size_role(std::string_view text);

struct SimConfig {
    std::int64_t duration_us = 8'280'000'000;  // 138 min
    std::uint64_t rng_seed = 1;
    std::vector<NfKind> nf_set{kAllNfs.begin(), kAllNfs.end()};
    // Off: NFs are treated as registered before the trace starts.
    bool registration = true;
    std::int64_t registration_stagger_us = 250'000;
    std::int64_t heartbeat_interval_us = 2'000'000;
    std::map<NfKind, std::int64_t> heartbeat_interval_by_nf;
    std::int64_t pfcp_heartbeat_interval_us = 1'000'000;
    // Mean events per minute (Poisson arrivals); 0 disables the family.
    double ue_registration_rate = 1.0;
    double session_event_rate = 1.0;
    double modification_rate = 3.0;
    bool ack_modeling = true;
    std::uint32_t tcp_ack_len = 66;
    std::array<SizeModel, kSizeRoleCount> size_models = default_size_models();
    std::map<NfKind, SizeModel> registration_put_by_nf = default_registration_sizes();
    // subscriber -> NF types it is notified about when they register.
    std::map<NfKind, std::vector<NfKind>> subscription_map = default_subscriptions();

    static std::array<SizeModel, kSizeRoleCount> default_size_models();
    static std::map<NfKind, SizeModel> default_registration_sizes();
    static std::map<NfKind, std::vector<NfKind>> default_subscriptions();

    std::int64_t heartbeat_interval(NfKind nf) const;
    const SizeModel& size(SizeRole role) const { return size_models[static_cast<std::size_t>(role)]; }
    SizeModel& size(SizeRole role) { return size_models[static_cast<std::size_t>(role)]; }
    const SizeModel& registration_size(NfKind nf) const;
    bool has(NfKind nf) const;

    // Throws ConfigError.
    void validate() const;
};

// Parses "60s", "138m", "250ms", "1h", "42us"; a bare integer is seconds.
std::int64_t parse_duration_us(std::string_view text);

// JSON (comments allowed) with the keys documented in README.md. Unknown
// keys are rejected. Keys absent from the document keep `base` values.
SimConfig load_sim_config(const std::string& path, SimConfig base = {});
SimConfig sim_config_from_json_text(std::string_view text, SimConfig base = {});

using PacketList = std::vector<PacketRecord>;

// Builds the packets of one signaling transaction. Each call draws from a
// substream keyed by (seed, family, index), so transaction families do not
// perturb each other's draws.
class TransactionBuilder {
public:
    explicit TransactionBuilder(const SimConfig& config) : config_(config) {}

    PacketList registration(NfKind nf, std::int64_t t) const;
    PacketList subscription(NfKind subscriber, std::int64_t t) const;
    PacketList heartbeat(NfKind nf, std::int64_t t, std::uint64_t seq) const;
    // `registered` lists NFs already registered (and hence subscribed).
    PacketList subscription_notifications(NfKind newly_registered, std::int64_t t,
                                          const std::vector<NfKind>& registered) const;
    PacketList policy_association(std::int64_t t, std::uint64_t seq) const;
    PacketList ue_registration(std::int64_t t, std::uint64_t seq) const;
    PacketList pdu_session(std::int64_t t, std::uint64_t seq) const;
    PacketList session_modification(std::int64_t t, std::uint64_t seq) const;
    PacketList pfcp_heartbeat(std::int64_t t, std::uint64_t seq) const;

private:
    struct Exchange;
    std::int64_t http_exchange(PacketList& out, KeyedRng& rng, const Exchange& ex,
                               std::int64_t t) const;
    std::int64_t udp_exchange(PacketList& out, KeyedRng& rng, NfKind client, NfKind server,
                              MsgKind req_kind, std::uint32_t req_len, MsgKind resp_kind,
                              std::uint32_t resp_len, std::int64_t t) const;
    std::int64_t policy_association_into(PacketList& out, KeyedRng& rng, std::int64_t t) const;

    const SimConfig& config_;
};

enum class EventType : std::uint8_t {
    Registration,
    Heartbeat,
    PfcpHeartbeat,
    UeRegistration,
    PduSession,
    Modification,
};

struct SimEvent {
    std::int64_t t = 0;
    EventType type = EventType::Heartbeat;
    NfKind nf = NfKind::NRF;
    std::uint64_t seq = 0;
};

// Min-queue on timestamp; equal timestamps pop in insertion order.
class EventQueue {
public:
    void push(const SimEvent& ev);
    SimEvent pop();
    const SimEvent& top() const { return heap_.top().ev; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Entry {
        SimEvent ev;
        std::uint64_t order;
        bool operator>(const Entry& o) const {
            return ev.t != o.ev.t ? ev.t > o.ev.t : order > o.order;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    std::uint64_t next_order_ = 0;
};

struct SimSummary {
    std::uint64_t total_packets = 0;
    std::array<std::uint64_t, kMsgKindCount> per_kind{};
};

// Deterministic: identical config (including seed) yields an identical stream.
// Packets are delivered in non-decreasing timestamp order. Validates the
// config before emitting anything.
SimSummary simulate(const SimConfig& config, const std::function<void(const PacketRecord&)>& sink);
PacketList simulate(const SimConfig& config);

}  // namespace coresig
