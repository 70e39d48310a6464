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

#include "sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

namespace coresig {

namespace {

constexpr std::array<std::string_view, kSizeRoleCount> kRoleNames = {
    "registration_put",
    "registration_response",
    "heartbeat_patch",
    "heartbeat_204",
    "subscription_post",
    "subscription_response",
    "notification_post",
    "notification_reply",
    "policy_assoc_post",
    "policy_assoc_extra",
    "policy_data_query",
    "policy_data",
    "sm_context_post",
    "sm_context_response",
    "session_modification",
    "session_modification_response",
    "pfcp_session_request",
    "pfcp_session_response",
    "pfcp_modification_request",
    "pfcp_modification_response",
    "pfcp_heartbeat",
    "auth_request",
    "auth_response",
    "auth_vector_request",
    "auth_vector_response",
    "auth_subscription_query",
    "auth_subscription_data",
    "auth_confirm",
    "auth_confirm_response",
    "uecm_registration",
    "uecm_response",
    "sdm_get",
    "sdm_data",
    "nssf_query",
    "nssf_response",
    "sm_data_get",
    "sm_data",
    "sm_policy_create",
    "sm_policy",
    "binding_create",
    "binding_response",
};

// Substream families.
enum Family : std::uint64_t {
    kFamRegistration = 1,
    kFamSubscription,
    kFamHeartbeat,
    kFamNotification,
    kFamPolicy,
    kFamUeRegistration,
    kFamPduSession,
    kFamModification,
    kFamPfcpHeartbeat,
    kFamUeArrivals,
    kFamSessionArrivals,
    kFamModificationArrivals,
};

// Log-normal around a median byte count; clamp at 70% of the median.
SizeModel around(double median, double sigma = 0.08) {
    return SizeModel::log_normal(std::log(median), sigma,
                                 static_cast<std::uint32_t>(median * 0.7));
}

}  // namespace

SizeModel SizeModel::fixed(std::uint32_t bytes) {
    SizeModel m;
    m.kind_ = Kind::Fixed;
    m.params_ = {static_cast<double>(bytes), 0.0, 0.0};
    return m;
}

SizeModel SizeModel::uniform(std::uint32_t lo, std::uint32_t hi) {
    SizeModel m;
    m.kind_ = Kind::Uniform;
    m.params_ = {static_cast<double>(lo), static_cast<double>(hi), 0.0};
    return m;
}

SizeModel SizeModel::log_normal(double mu, double sigma, std::uint32_t min_clamp) {
    SizeModel m;
    m.kind_ = Kind::LogNormal;
    m.params_ = {mu, sigma, static_cast<double>(min_clamp)};
    return m;
}

std::uint32_t SizeModel::sample(KeyedRng& rng) const {
    double v = 1.0;
    switch (kind_) {
        case Kind::Fixed:
            v = params_[0];
            break;
        case Kind::Uniform:
            v = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(params_[0]),
                                                    static_cast<std::int64_t>(params_[1])));
            break;
        case Kind::LogNormal:
            v = std::round(std::exp(params_[0] + params_[1] * rng.normal()));
            v = std::max(v, params_[2]);
            break;
    }
    return static_cast<std::uint32_t>(std::clamp(v, 1.0, 65535.0));
}

void SizeModel::validate(std::string_view role) const {
    const std::string where = "size model '" + std::string(role) + "'";
    switch (kind_) {
        case Kind::Fixed:
            if (params_[0] < 1 || params_[0] > 65535) throw ConfigError(where + ": bytes must be in [1, 65535]");
            break;
        case Kind::Uniform:
            if (params_[0] < 1 || params_[1] > 65535 || params_[0] > params_[1]) {
                throw ConfigError(where + ": uniform bounds must satisfy 1 <= lo <= hi <= 65535");
            }
            break;
        case Kind::LogNormal:
            if (!std::isfinite(params_[0]) || !std::isfinite(params_[1]) || params_[1] < 0) {
                throw ConfigError(where + ": lognormal needs finite mu and sigma >= 0");
            }
            if (params_[2] < 1) throw ConfigError(where + ": min_clamp must be >= 1");
            break;
    }
}

std::string_view to_string(SizeRole role) { return kRoleNames[static_cast<std::size_t>(role)]; }

std::optional<SizeRole> parse_size_role(std::string_view text) {
    for (std::size_t i = 0; i < kSizeRoleCount; ++i) {
        if (kRoleNames[i] == text) return static_cast<SizeRole>(i);
    }
    return std::nullopt;
}

// Calibrated defaults (bytes on the wire). Orderings that matter downstream:
//   heartbeat_patch > heartbeat_204 > tcp ack (two-peak NRF histograms),
//   notification_post > every registration_put (NRF-sent maxima),
//   sm_context_response < sm_context_post, policy response = request + extra.
std::array<SizeModel, kSizeRoleCount> SimConfig::default_size_models() {
    std::array<SizeModel, kSizeRoleCount> m;
    auto set = [&m](SizeRole r, SizeModel s) { m[static_cast<std::size_t>(r)] = s; };
    set(SizeRole::RegistrationPut, around(700, 0.04));
    set(SizeRole::RegistrationResponse, around(430, 0.05));
    set(SizeRole::HeartbeatPatch, SizeModel::log_normal(std::log(236.0), 0.04, 190));
    set(SizeRole::Heartbeat204, SizeModel::uniform(130, 158));
    set(SizeRole::SubscriptionPost, around(560, 0.05));
    set(SizeRole::SubscriptionResponse, around(600, 0.05));
    set(SizeRole::NotificationPost, SizeModel::log_normal(std::log(1720.0), 0.04, 1500));
    set(SizeRole::NotificationReply, SizeModel::uniform(130, 158));
    set(SizeRole::PolicyAssocPost, around(640));
    set(SizeRole::PolicyAssocExtra, SizeModel::log_normal(std::log(190.0), 0.2, 40));
    set(SizeRole::PolicyDataQuery, around(260));
    set(SizeRole::PolicyData, around(520));
    set(SizeRole::SmContextPost, SizeModel::log_normal(std::log(1080.0), 0.06, 800));
    set(SizeRole::SmContextResponse, SizeModel::uniform(180, 320));
    set(SizeRole::SessionModification, SizeModel::uniform(240, 1180));
    set(SizeRole::SessionModificationResponse, SizeModel::uniform(150, 260));
    set(SizeRole::PfcpSessionRequest, around(330));
    set(SizeRole::PfcpSessionResponse, around(130, 0.05));
    set(SizeRole::PfcpModificationRequest, around(190, 0.1));
    set(SizeRole::PfcpModificationResponse, SizeModel::uniform(70, 90));
    set(SizeRole::PfcpHeartbeat, SizeModel::fixed(58));
    set(SizeRole::AuthRequest, around(380));
    set(SizeRole::AuthResponse, around(640));
    set(SizeRole::AuthVectorRequest, around(330));
    set(SizeRole::AuthVectorResponse, around(560));
    set(SizeRole::AuthSubscriptionQuery, around(250));
    set(SizeRole::AuthSubscriptionData, around(480));
    set(SizeRole::AuthConfirm, around(300));
    set(SizeRole::AuthConfirmResponse, around(280));
    set(SizeRole::UecmRegistration, around(520));
    set(SizeRole::UecmResponse, around(480));
    set(SizeRole::SdmGet, around(240));
    set(SizeRole::SdmData, around(700));
    set(SizeRole::NssfQuery, around(330));
    set(SizeRole::NssfResponse, around(520));
    set(SizeRole::SmDataGet, around(250));
    set(SizeRole::SmData, around(620));
    set(SizeRole::SmPolicyCreate, around(760));
    set(SizeRole::SmPolicy, around(680));
    set(SizeRole::BindingCreate, around(420));
    set(SizeRole::BindingResponse, around(440));
    return m;
}

// NFs with richer profiles (AMF, SMF) register the largest bodies.
std::map<NfKind, SizeModel> SimConfig::default_registration_sizes() {
    return {
        {NfKind::AMF, around(1250, 0.03)}, {NfKind::SMF, around(1150, 0.03)},
        {NfKind::AUSF, around(620, 0.03)}, {NfKind::UDM, around(760, 0.03)},
        {NfKind::UDR, around(640, 0.03)},  {NfKind::PCF, around(820, 0.03)},
        {NfKind::NSSF, around(700, 0.03)}, {NfKind::BSF, around(600, 0.03)},
        {NfKind::UPF, around(560, 0.03)},
    };
}

std::map<NfKind, std::vector<NfKind>> SimConfig::default_subscriptions() {
    return {
        {NfKind::AMF, {NfKind::SMF, NfKind::AUSF, NfKind::UDM, NfKind::PCF}},
        {NfKind::SMF, {NfKind::UDM, NfKind::PCF}},
        {NfKind::AUSF, {NfKind::UDM}},
    };
}

std::int64_t SimConfig::heartbeat_interval(NfKind nf) const {
    auto it = heartbeat_interval_by_nf.find(nf);
    return it == heartbeat_interval_by_nf.end() ? heartbeat_interval_us : it->second;
}

const SizeModel& SimConfig::registration_size(NfKind nf) const {
    auto it = registration_put_by_nf.find(nf);
    return it == registration_put_by_nf.end() ? size(SizeRole::RegistrationPut) : it->second;
}

bool SimConfig::has(NfKind nf) const {
    return std::find(nf_set.begin(), nf_set.end(), nf) != nf_set.end();
}

void SimConfig::validate() const {
    if (duration_us < 0) throw ConfigError("duration must be >= 0");
    if (heartbeat_interval_us <= 0) throw ConfigError("heartbeat_interval_us must be > 0");
    std::int64_t min_interval = heartbeat_interval_us;
    for (const auto& [nf, interval] : heartbeat_interval_by_nf) {
        if (interval <= 0) {
            throw ConfigError("heartbeat interval for " + std::string(to_string(nf)) + " must be > 0");
        }
        min_interval = std::min(min_interval, interval);
    }
    if (duration_us > 0 && duration_us < min_interval) {
        throw ConfigError("duration (" + std::to_string(duration_us) +
                          " us) is shorter than one heartbeat interval (" +
                          std::to_string(min_interval) + " us)");
    }
    if (pfcp_heartbeat_interval_us <= 0) throw ConfigError("pfcp_heartbeat_interval_us must be > 0");
    if (registration_stagger_us < 0) throw ConfigError("registration_stagger_us must be >= 0");
    for (auto [name, rate] : {std::pair{"ue_registration_rate", ue_registration_rate},
                              std::pair{"session_event_rate", session_event_rate},
                              std::pair{"modification_rate", modification_rate}}) {
        if (!std::isfinite(rate) || rate < 0) throw ConfigError(std::string(name) + " must be finite and >= 0");
    }
    if (tcp_ack_len < 1) throw ConfigError("tcp_ack_len must be >= 1");
    std::set<NfKind> seen;
    for (NfKind nf : nf_set) {
        if (!seen.insert(nf).second) throw ConfigError("nf_set lists " + std::string(to_string(nf)) + " twice");
    }
    for (std::size_t i = 0; i < kSizeRoleCount; ++i) size_models[i].validate(kRoleNames[i]);
    for (const auto& [nf, model] : registration_put_by_nf) {
        model.validate("registration_put_by_nf." + std::string(to_string(nf)));
    }
    for (const auto& [subscriber, targets] : subscription_map) {
        for (NfKind target : targets) {
            if (target == subscriber || target == NfKind::NRF || subscriber == NfKind::NRF) {
                throw ConfigError("subscription_map: invalid entry " + std::string(to_string(subscriber)) +
                                  " -> " + std::string(to_string(target)));
            }
        }
    }
}

std::int64_t parse_duration_us(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == 0) throw ConfigError("invalid duration '" + std::string(text) + "'");
    std::int64_t value = 0;
    for (std::size_t i = 0; i < pos; ++i) {
        if (value > (std::numeric_limits<std::int64_t>::max() - 9) / 10) {
            throw ConfigError("duration out of range: '" + std::string(text) + "'");
        }
        value = value * 10 + (text[i] - '0');
    }
    const std::string_view unit = text.substr(pos);
    std::int64_t scale = 0;
    if (unit.empty() || unit == "s") scale = 1'000'000;
    else if (unit == "us") scale = 1;
    else if (unit == "ms") scale = 1'000;
    else if (unit == "m" || unit == "min") scale = 60'000'000;
    else if (unit == "h") scale = 3'600'000'000;
    else throw ConfigError("invalid duration unit in '" + std::string(text) + "'");
    if (value > std::numeric_limits<std::int64_t>::max() / scale) {
        throw ConfigError("duration out of range: '" + std::string(text) + "'");
    }
    return value * scale;
}

// ---------------------------------------------------------------------------
// Transactions

struct TransactionBuilder::Exchange {
    NfKind client;
    NfKind server;
    MsgKind req_kind;
    std::uint32_t req_len;
    MsgKind resp_kind;
    std::uint32_t resp_len;
};

namespace {

PacketRecord packet(std::int64_t t, NfKind src, NfKind dst, TransportProto proto,
                    std::uint32_t len, MsgKind kind) {
    return PacketRecord{t, Endpoint::core(src), Endpoint::core(dst), proto, len, kind};
}

std::uint64_t nf_seq(NfKind nf, std::uint64_t seq) {
    return (static_cast<std::uint64_t>(index_of(nf)) << 48) | seq;
}

}  // namespace

// Request, server ACK, response, client ACK. Returns the last timestamp.
std::int64_t TransactionBuilder::http_exchange(PacketList& out, KeyedRng& rng, const Exchange& ex,
                                               std::int64_t t) const {
    if (!config_.has(ex.client) || !config_.has(ex.server)) return t;
    const auto ack_delay = [&rng] { return rng.uniform_int(80, 300); };
    const std::int64_t t_resp = t + rng.uniform_int(600, 2500);
    out.push_back(packet(t, ex.client, ex.server, TransportProto::TCP, ex.req_len, ex.req_kind));
    if (config_.ack_modeling) {
        out.push_back(packet(t + ack_delay(), ex.server, ex.client, TransportProto::TCP,
                             config_.tcp_ack_len, MsgKind::TcpAck));
    }
    out.push_back(packet(t_resp, ex.server, ex.client, TransportProto::TCP, ex.resp_len, ex.resp_kind));
    std::int64_t end = t_resp;
    if (config_.ack_modeling) {
        end = t_resp + ack_delay();
        out.push_back(packet(end, ex.client, ex.server, TransportProto::TCP, config_.tcp_ack_len,
                             MsgKind::TcpAck));
    }
    return end;
}

std::int64_t TransactionBuilder::udp_exchange(PacketList& out, KeyedRng& rng, NfKind client,
                                              NfKind server, MsgKind req_kind, std::uint32_t req_len,
                                              MsgKind resp_kind, std::uint32_t resp_len,
                                              std::int64_t t) const {
    if (!config_.has(client) || !config_.has(server)) return t;
    const std::int64_t t_resp = t + rng.uniform_int(200, 1200);
    out.push_back(packet(t, client, server, TransportProto::UDP, req_len, req_kind));
    out.push_back(packet(t_resp, server, client, TransportProto::UDP, resp_len, resp_kind));
    return t_resp;
}

PacketList TransactionBuilder::registration(NfKind nf, std::int64_t t) const {
    PacketList out;
    if (nf == NfKind::NRF) return out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamRegistration, index_of(nf));
    const std::uint32_t put = config_.registration_size(nf).sample(rng);
    const std::uint32_t resp = config_.size(SizeRole::RegistrationResponse).sample(rng);
    http_exchange(out, rng, {nf, NfKind::NRF, MsgKind::RegistrationPut, put, MsgKind::HttpResponseBody, resp}, t);
    return out;
}

PacketList TransactionBuilder::subscription(NfKind subscriber, std::int64_t t) const {
    PacketList out;
    auto it = config_.subscription_map.find(subscriber);
    if (it == config_.subscription_map.end() || it->second.empty()) return out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamSubscription, index_of(subscriber));
    const std::uint32_t post = config_.size(SizeRole::SubscriptionPost).sample(rng);
    const std::uint32_t resp = config_.size(SizeRole::SubscriptionResponse).sample(rng);
    http_exchange(out, rng,
                  {subscriber, NfKind::NRF, MsgKind::SubscriptionPost, post, MsgKind::HttpResponseBody, resp}, t);
    return out;
}

PacketList TransactionBuilder::heartbeat(NfKind nf, std::int64_t t, std::uint64_t seq) const {
    PacketList out;
    if (nf == NfKind::NRF) return out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamHeartbeat, nf_seq(nf, seq));
    const std::uint32_t patch = config_.size(SizeRole::HeartbeatPatch).sample(rng);
    const std::uint32_t no_content = config_.size(SizeRole::Heartbeat204).sample(rng);
    http_exchange(out, rng,
                  {nf, NfKind::NRF, MsgKind::HeartbeatPatch, patch, MsgKind::Http204NoContent, no_content}, t);
    return out;
}

PacketList TransactionBuilder::subscription_notifications(NfKind newly_registered, std::int64_t t,
                                                          const std::vector<NfKind>& registered) const {
    PacketList out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamNotification, index_of(newly_registered));
    for (NfKind subscriber : registered) {
        if (subscriber == newly_registered) continue;
        auto it = config_.subscription_map.find(subscriber);
        if (it == config_.subscription_map.end()) continue;
        if (std::find(it->second.begin(), it->second.end(), newly_registered) == it->second.end()) continue;
        const std::uint32_t post = config_.size(SizeRole::NotificationPost).sample(rng);
        const std::uint32_t reply = config_.size(SizeRole::NotificationReply).sample(rng);
        t = http_exchange(out, rng,
                          {NfKind::NRF, subscriber, MsgKind::NotificationPost, post, MsgKind::Other, reply}, t) +
            rng.uniform_int(100, 500);
    }
    return out;
}

std::int64_t TransactionBuilder::policy_association_into(PacketList& out, KeyedRng& rng, std::int64_t t) const {
    const std::uint32_t request = config_.size(SizeRole::PolicyAssocPost).sample(rng);
    // The PCF echoes the request object and adds the created policy.
    const std::uint32_t extra = config_.size(SizeRole::PolicyAssocExtra).sample(rng);
    const std::uint32_t response = std::min<std::uint32_t>(request + extra, 65535);
    return http_exchange(out, rng,
                         {NfKind::AMF, NfKind::PCF, MsgKind::PolicyAssocPost, request, MsgKind::HttpResponseBody, response},
                         t);
}

PacketList TransactionBuilder::policy_association(std::int64_t t, std::uint64_t seq) const {
    PacketList out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamPolicy, seq);
    policy_association_into(out, rng, t);
    return out;
}

PacketList TransactionBuilder::ue_registration(std::int64_t t, std::uint64_t seq) const {
    PacketList out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamUeRegistration, seq);
    const auto gap = [&rng] { return rng.uniform_int(200, 2000); };
    const auto sbi = [&](NfKind client, NfKind server, SizeRole req, SizeRole resp, std::int64_t at) {
        const std::uint32_t req_len = config_.size(req).sample(rng);
        const std::uint32_t resp_len = config_.size(resp).sample(rng);
        return http_exchange(out, rng,
                             {client, server, MsgKind::Other, req_len, MsgKind::HttpResponseBody, resp_len}, at) +
               gap();
    };
    t = sbi(NfKind::AMF, NfKind::AUSF, SizeRole::AuthRequest, SizeRole::AuthResponse, t);
    t = sbi(NfKind::AUSF, NfKind::UDM, SizeRole::AuthVectorRequest, SizeRole::AuthVectorResponse, t);
    t = sbi(NfKind::UDM, NfKind::UDR, SizeRole::AuthSubscriptionQuery, SizeRole::AuthSubscriptionData, t);
    t = sbi(NfKind::AMF, NfKind::AUSF, SizeRole::AuthConfirm, SizeRole::AuthConfirmResponse, t);
    t = sbi(NfKind::AMF, NfKind::UDM, SizeRole::UecmRegistration, SizeRole::UecmResponse, t);
    t = sbi(NfKind::AMF, NfKind::UDM, SizeRole::SdmGet, SizeRole::SdmData, t);
    if (config_.has(NfKind::AMF) && config_.has(NfKind::PCF)) t = policy_association_into(out, rng, t) + gap();
    sbi(NfKind::PCF, NfKind::UDR, SizeRole::PolicyDataQuery, SizeRole::PolicyData, t);
    return out;
}

PacketList TransactionBuilder::pdu_session(std::int64_t t, std::uint64_t seq) const {
    PacketList out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamPduSession, seq);
    const auto gap = [&rng] { return rng.uniform_int(200, 2000); };
    const auto sbi = [&](NfKind client, NfKind server, MsgKind req_kind, SizeRole req, SizeRole resp,
                         std::int64_t at) {
        const std::uint32_t req_len = config_.size(req).sample(rng);
        const std::uint32_t resp_len = config_.size(resp).sample(rng);
        return http_exchange(out, rng, {client, server, req_kind, req_len, MsgKind::HttpResponseBody, resp_len}, at) +
               gap();
    };
    t = sbi(NfKind::AMF, NfKind::NSSF, MsgKind::Other, SizeRole::NssfQuery, SizeRole::NssfResponse, t);
    t = sbi(NfKind::AMF, NfKind::SMF, MsgKind::SmContextPost, SizeRole::SmContextPost, SizeRole::SmContextResponse, t);
    t = sbi(NfKind::SMF, NfKind::UDM, MsgKind::Other, SizeRole::SmDataGet, SizeRole::SmData, t);
    t = sbi(NfKind::SMF, NfKind::PCF, MsgKind::Other, SizeRole::SmPolicyCreate, SizeRole::SmPolicy, t);
    t = sbi(NfKind::PCF, NfKind::BSF, MsgKind::Other, SizeRole::BindingCreate, SizeRole::BindingResponse, t);
    const std::uint32_t req = config_.size(SizeRole::PfcpSessionRequest).sample(rng);
    const std::uint32_t resp = config_.size(SizeRole::PfcpSessionResponse).sample(rng);
    udp_exchange(out, rng, NfKind::SMF, NfKind::UPF, MsgKind::PfcpRequest, req, MsgKind::PfcpResponse, resp, t);
    return out;
}

PacketList TransactionBuilder::session_modification(std::int64_t t, std::uint64_t seq) const {
    PacketList out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamModification, seq);
    const std::uint32_t mod = config_.size(SizeRole::SessionModification).sample(rng);
    const std::uint32_t mod_resp = config_.size(SizeRole::SessionModificationResponse).sample(rng);
    t = http_exchange(out, rng,
                      {NfKind::AMF, NfKind::SMF, MsgKind::SessionModification, mod, MsgKind::HttpResponseBody, mod_resp},
                      t) +
        rng.uniform_int(200, 2000);
    const std::uint32_t req = config_.size(SizeRole::PfcpModificationRequest).sample(rng);
    const std::uint32_t resp = config_.size(SizeRole::PfcpModificationResponse).sample(rng);
    udp_exchange(out, rng, NfKind::SMF, NfKind::UPF, MsgKind::PfcpRequest, req, MsgKind::PfcpResponse, resp, t);
    return out;
}

PacketList TransactionBuilder::pfcp_heartbeat(std::int64_t t, std::uint64_t seq) const {
    PacketList out;
    auto rng = KeyedRng::derive(config_.rng_seed, kFamPfcpHeartbeat, seq);
    const std::uint32_t req = config_.size(SizeRole::PfcpHeartbeat).sample(rng);
    const std::uint32_t resp = config_.size(SizeRole::PfcpHeartbeat).sample(rng);
    udp_exchange(out, rng, NfKind::SMF, NfKind::UPF, MsgKind::PfcpHeartbeat, req, MsgKind::PfcpHeartbeat, resp, t);
    return out;
}

// ---------------------------------------------------------------------------
// Event queue and driver

void EventQueue::push(const SimEvent& ev) { heap_.push(Entry{ev, next_order_++}); }

SimEvent EventQueue::pop() {
    SimEvent ev = heap_.top().ev;
    heap_.pop();
    return ev;
}

namespace {

// Reorders packets from overlapping transactions into timestamp order.
class PacketReorder {
public:
    explicit PacketReorder(const std::function<void(const PacketRecord&)>& sink, SimSummary& summary)
        : sink_(sink), summary_(summary) {}

    void add(PacketList packets) {
        for (auto& p : packets) heap_.push(Pending{std::move(p), next_++});
    }

    // Safe once no future transaction can start before `t`.
    void flush_through(std::int64_t t) {
        while (!heap_.empty() && heap_.top().rec.timestamp_us <= t) emit();
    }

    void flush_all() {
        while (!heap_.empty()) emit();
    }

private:
    struct Pending {
        PacketRecord rec;
        std::uint64_t order;
        bool operator>(const Pending& o) const {
            return rec.timestamp_us != o.rec.timestamp_us ? rec.timestamp_us > o.rec.timestamp_us
                                                          : order > o.order;
        }
    };

    void emit() {
        const PacketRecord& rec = heap_.top().rec;
        ++summary_.total_packets;
        ++summary_.per_kind[static_cast<std::size_t>(rec.kind)];
        sink_(rec);
        heap_.pop();
    }

    const std::function<void(const PacketRecord&)>& sink_;
    SimSummary& summary_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> heap_;
    std::uint64_t next_ = 0;
};

// Poisson arrivals for one workload family.
class Arrivals {
public:
    Arrivals(std::uint64_t seed, std::uint64_t family, double per_minute)
        : rng_(KeyedRng::derive(seed, family, 0)),
          mean_us_(per_minute > 0 ? 60'000'000.0 / per_minute : 0.0) {}

    bool enabled() const { return mean_us_ > 0; }
    std::int64_t next(std::int64_t from) {
        return from + 1 + static_cast<std::int64_t>(std::floor(rng_.exponential(mean_us_)));
    }

private:
    KeyedRng rng_;
    double mean_us_;
};

}  // namespace

SimSummary simulate(const SimConfig& config, const std::function<void(const PacketRecord&)>& sink) {
    config.validate();
    SimSummary summary;
    TransactionBuilder builder(config);
    PacketReorder reorder(sink, summary);
    EventQueue queue;
    const std::int64_t horizon = config.duration_us;

    const auto schedule = [&](const SimEvent& ev) {
        if (ev.t <= horizon) queue.push(ev);
    };

    std::vector<NfKind> registered;
    std::int64_t offset = 0;
    if (config.has(NfKind::NRF)) {
        for (NfKind nf : config.nf_set) {
            if (nf == NfKind::NRF) continue;
            if (config.registration) {
                schedule({offset, EventType::Registration, nf, 0});
            } else {
                registered.push_back(nf);
                schedule({offset + config.heartbeat_interval(nf), EventType::Heartbeat, nf, 1});
            }
            offset += config.registration_stagger_us;
        }
    }
    if (config.has(NfKind::SMF) && config.has(NfKind::UPF)) {
        schedule({config.pfcp_heartbeat_interval_us, EventType::PfcpHeartbeat, NfKind::SMF, 1});
    }

    // Workload starts once every NF has had its registration slot.
    const std::int64_t workload_start = offset;
    Arrivals ue_arrivals(config.rng_seed, kFamUeArrivals, config.ue_registration_rate);
    Arrivals session_arrivals(config.rng_seed, kFamSessionArrivals, config.session_event_rate);
    Arrivals mod_arrivals(config.rng_seed, kFamModificationArrivals, config.modification_rate);
    if (config.has(NfKind::AMF)) {
        if (ue_arrivals.enabled()) schedule({ue_arrivals.next(workload_start), EventType::UeRegistration, NfKind::AMF, 0});
        if (config.has(NfKind::SMF)) {
            if (session_arrivals.enabled()) {
                schedule({session_arrivals.next(workload_start), EventType::PduSession, NfKind::SMF, 0});
            }
            if (mod_arrivals.enabled()) {
                schedule({mod_arrivals.next(workload_start), EventType::Modification, NfKind::SMF, 0});
            }
        }
    }

    std::uint64_t sessions_established = 0;
    std::uint64_t modifications = 0;
    while (!queue.empty()) {
        const SimEvent ev = queue.pop();
        reorder.flush_through(ev.t);
        switch (ev.type) {
            case EventType::Registration: {
                PacketList pkts = builder.registration(ev.nf, ev.t);
                std::int64_t end = pkts.empty() ? ev.t : pkts.back().timestamp_us;
                reorder.add(std::move(pkts));
                PacketList sub = builder.subscription(ev.nf, end + 500);
                if (!sub.empty()) end = sub.back().timestamp_us;
                reorder.add(std::move(sub));
                reorder.add(builder.subscription_notifications(ev.nf, end + 1000, registered));
                registered.push_back(ev.nf);
                schedule({ev.t + config.heartbeat_interval(ev.nf), EventType::Heartbeat, ev.nf, 1});
                break;
            }
            case EventType::Heartbeat:
                reorder.add(builder.heartbeat(ev.nf, ev.t, ev.seq));
                schedule({ev.t + config.heartbeat_interval(ev.nf), EventType::Heartbeat, ev.nf, ev.seq + 1});
                break;
            case EventType::PfcpHeartbeat:
                reorder.add(builder.pfcp_heartbeat(ev.t, ev.seq));
                schedule({ev.t + config.pfcp_heartbeat_interval_us, EventType::PfcpHeartbeat, ev.nf, ev.seq + 1});
                break;
            case EventType::UeRegistration:
                reorder.add(builder.ue_registration(ev.t, ev.seq));
                schedule({ue_arrivals.next(ev.t), EventType::UeRegistration, ev.nf, ev.seq + 1});
                break;
            case EventType::PduSession:
                reorder.add(builder.pdu_session(ev.t, ev.seq));
                ++sessions_established;
                schedule({session_arrivals.next(ev.t), EventType::PduSession, ev.nf, ev.seq + 1});
                break;
            case EventType::Modification:
                // Modifications only apply to sessions that already exist.
                if (sessions_established > 0) reorder.add(builder.session_modification(ev.t, modifications++));
                schedule({mod_arrivals.next(ev.t), EventType::Modification, ev.nf, ev.seq + 1});
                break;
        }
    }
    reorder.flush_all();
    return summary;
}

PacketList simulate(const SimConfig& config) {
    PacketList out;
    simulate(config, [&out](const PacketRecord& rec) { out.push_back(rec); });
    return out;
}

}  // namespace coresig
