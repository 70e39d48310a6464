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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sim.hpp"

namespace coresig {

namespace {

using nlohmann::json;

NfKind nf_from_json(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + ": expected an NF name");
    auto nf = parse_nf(j.get<std::string>());
    if (!nf) throw ConfigError(where + ": unknown NF '" + j.get<std::string>() + "'");
    return *nf;
}

NfKind nf_from_key(const std::string& key, const std::string& where) {
    auto nf = parse_nf(key);
    if (!nf) throw ConfigError(where + ": unknown NF '" + key + "'");
    return *nf;
}

// Integer microseconds or a duration string ("10s").
std::int64_t micros(const json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return parse_duration_us(j.get<std::string>());
    throw ConfigError(where + ": expected integer microseconds or a duration string");
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

std::uint32_t bytes(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1 || j.get<std::int64_t>() > 65535) {
        throw ConfigError(where + ": expected an integer byte count in [1, 65535]");
    }
    return j.get<std::uint32_t>();
}

SizeModel model_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ": size model needs a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    auto field = [&](const char* name) -> const json& {
        if (!j.contains(name)) throw ConfigError(where + ": missing '" + name + "'");
        return j.at(name);
    };
    if (kind == "fixed") return SizeModel::fixed(bytes(field("bytes"), where + ".bytes"));
    if (kind == "uniform") {
        return SizeModel::uniform(bytes(field("lo"), where + ".lo"), bytes(field("hi"), where + ".hi"));
    }
    if (kind == "lognormal") {
        return SizeModel::log_normal(number(field("mu"), where + ".mu"), number(field("sigma"), where + ".sigma"),
                                     bytes(field("min_clamp"), where + ".min_clamp"));
    }
    throw ConfigError(where + ": unknown size model kind '" + kind + "'");
}

void apply_overrides(const json& doc, SimConfig& cfg) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "duration" || key == "duration_us") {
            cfg.duration_us = micros(value, key);
        } else if (key == "rng_seed") {
            if (!value.is_number_unsigned() && !value.is_number_integer()) throw ConfigError("rng_seed: expected integer");
            cfg.rng_seed = value.get<std::uint64_t>();
        } else if (key == "nf_set") {
            if (!value.is_array()) throw ConfigError("nf_set: expected an array");
            cfg.nf_set.clear();
            for (const auto& item : value) cfg.nf_set.push_back(nf_from_json(item, "nf_set"));
        } else if (key == "registration") {
            cfg.registration = value.get<bool>();
        } else if (key == "registration_stagger_us") {
            cfg.registration_stagger_us = micros(value, key);
        } else if (key == "heartbeat_interval_us") {
            cfg.heartbeat_interval_us = micros(value, key);
        } else if (key == "heartbeat_interval_by_nf") {
            cfg.heartbeat_interval_by_nf.clear();
            for (const auto& [nf, interval] : value.items()) {
                cfg.heartbeat_interval_by_nf[nf_from_key(nf, key)] = micros(interval, key + "." + nf);
            }
        } else if (key == "pfcp_heartbeat_interval_us") {
            cfg.pfcp_heartbeat_interval_us = micros(value, key);
        } else if (key == "ue_registration_rate") {
            cfg.ue_registration_rate = number(value, key);
        } else if (key == "session_event_rate") {
            cfg.session_event_rate = number(value, key);
        } else if (key == "modification_rate") {
            cfg.modification_rate = number(value, key);
        } else if (key == "ack_modeling") {
            cfg.ack_modeling = value.get<bool>();
        } else if (key == "tcp_ack_len") {
            cfg.tcp_ack_len = bytes(value, key);
        } else if (key == "size_models") {
            for (const auto& [role, model] : value.items()) {
                auto r = parse_size_role(role);
                if (!r) throw ConfigError("size_models: unknown role '" + role + "'");
                cfg.size(*r) = model_from_json(model, "size_models." + role);
            }
        } else if (key == "registration_put_by_nf") {
            cfg.registration_put_by_nf.clear();
            for (const auto& [nf, model] : value.items()) {
                cfg.registration_put_by_nf[nf_from_key(nf, key)] = model_from_json(model, key + "." + nf);
            }
        } else if (key == "subscription_map") {
            cfg.subscription_map.clear();
            for (const auto& [nf, targets] : value.items()) {
                if (!targets.is_array()) throw ConfigError("subscription_map." + nf + ": expected an array");
                auto& list = cfg.subscription_map[nf_from_key(nf, key)];
                for (const auto& t : targets) list.push_back(nf_from_json(t, "subscription_map." + nf));
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

}  // namespace

SimConfig sim_config_from_json_text(std::string_view text, SimConfig base) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
        apply_overrides(doc, base);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    base.validate();
    return base;
}

SimConfig load_sim_config(const std::string& path, SimConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sim_config_from_json_text(ss.str(), std::move(base));
}

}  // namespace coresig
