#include "uavsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace uavsim {

using nlohmann::ordered_json;

std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::N2N_BS: return "n2n-bs";
        case Scheme::N2N_UAV_NO_BC: return "n2n-uav-no-bc";
        case Scheme::N2N_UAV_BC: return "n2n-uav-bc";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    for (auto s : {Scheme::N2N_BS, Scheme::N2N_UAV_NO_BC, Scheme::N2N_UAV_BC}) {
        if (scheme_name(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view role_name(Role r) {
    switch (r) {
        case Role::MobileNode: return "node";
        case Role::Uav: return "uav";
        case Role::BaseStation: return "bs";
    }
    return "unknown";
}

std::string_view rogue_mobility_name(RogueMobility m) {
    return m == RogueMobility::Random ? "random" : "density";
}

namespace {

struct Field {
    std::string name;
    std::function<void(SimConfig&, const ordered_json&)> read;
    std::function<ordered_json(const SimConfig&)> write;
};

template <typename T>
Field member(std::string name, T SimConfig::*ptr) {
    Field f;
    f.name = name;
    f.read = [ptr, name](SimConfig& c, const ordered_json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigParseError(name + ": expected boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigParseError(name + ": expected integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) {
                    c.*ptr = v.get<T>();
                    return;
                }
                if (v.get<std::int64_t>() < 0) throw ConfigParseError(name + ": expected non-negative integer");
            }
        } else {
            if (!v.is_number()) throw ConfigParseError(name + ": expected number");
        }
        c.*ptr = v.get<T>();
    };
    f.write = [ptr](const SimConfig& c) { return ordered_json(c.*ptr); };
    return f;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        t.push_back(member("schema_version", &SimConfig::schema_version));
        t.push_back(member("area_width_m", &SimConfig::area_width_m));
        t.push_back(member("area_height_m", &SimConfig::area_height_m));
        t.push_back(member("n_nodes", &SimConfig::n_nodes));
        t.push_back(member("n_uavs", &SimConfig::n_uavs));
        t.push_back(member("n_bs", &SimConfig::n_bs));
        t.push_back(member("uav_altitude_m", &SimConfig::uav_altitude_m));
        t.push_back(member("bs_height_m", &SimConfig::bs_height_m));
        t.push_back(member("duration_s", &SimConfig::duration_s));
        t.push_back(member("cbr_packet_bytes", &SimConfig::cbr_packet_bytes));
        t.push_back(member("cbr_interval_s", &SimConfig::cbr_interval_s));
        t.push_back(member("tx_power_uav_w", &SimConfig::tx_power_uav_w));
        t.push_back(member("tx_power_node_w", &SimConfig::tx_power_node_w));
        t.push_back(Field{
            "scheme",
            [](SimConfig& c, const ordered_json& v) {
                if (!v.is_string()) throw ConfigParseError("scheme: expected string");
                auto s = parse_scheme(v.get<std::string>());
                if (!s) throw ConfigValidationError("scheme", "unknown scheme '" + v.get<std::string>() + "'");
                c.scheme = *s;
            },
            [](const SimConfig& c) { return ordered_json(std::string(scheme_name(c.scheme))); }});
        t.push_back(member("seed", &SimConfig::seed));
        t.push_back(member("node_speed_min_mps", &SimConfig::node_speed_min_mps));
        t.push_back(member("node_speed_max_mps", &SimConfig::node_speed_max_mps));
        t.push_back(member("mobility_tick_s", &SimConfig::mobility_tick_s));
        t.push_back(member("reposition_interval_s", &SimConfig::reposition_interval_s));
        t.push_back(member("density_cell_m", &SimConfig::density_cell_m));
        t.push_back(member("reposition_jitter", &SimConfig::reposition_jitter));
        t.push_back(member("reposition_speed_mps", &SimConfig::reposition_speed_mps));
        t.push_back(member("n2d_range_m", &SimConfig::n2d_range_m));
        t.push_back(member("d2d_range_m", &SimConfig::d2d_range_m));
        t.push_back(member("n2b_range_m", &SimConfig::n2b_range_m));
        t.push_back(member("d2b_range_m", &SimConfig::d2b_range_m));
        t.push_back(member("path_loss_exponent", &SimConfig::path_loss_exponent));
        t.push_back(member("success_uav_tx", &SimConfig::success_uav_tx));
        t.push_back(member("success_node_tx", &SimConfig::success_node_tx));
        t.push_back(member("success_bs_tx", &SimConfig::success_bs_tx));
        t.push_back(member("admission_slot_s", &SimConfig::admission_slot_s));
        t.push_back(member("bs_capacity_pps", &SimConfig::bs_capacity_pps));
        t.push_back(member("uav_capacity_pps", &SimConfig::uav_capacity_pps));
        t.push_back(member("rogue_uav_fraction", &SimConfig::rogue_uav_fraction));
        t.push_back(Field{
            "rogue_mobility",
            [](SimConfig& c, const ordered_json& v) {
                if (!v.is_string()) throw ConfigParseError("rogue_mobility: expected string");
                const auto s = v.get<std::string>();
                if (s == "random") {
                    c.rogue_mobility = RogueMobility::Random;
                } else if (s == "density") {
                    c.rogue_mobility = RogueMobility::Density;
                } else {
                    throw ConfigValidationError("rogue_mobility", "expected 'random' or 'density', got '" + s + "'");
                }
            },
            [](const SimConfig& c) { return ordered_json(std::string(rogue_mobility_name(c.rogue_mobility))); }});
        t.push_back(member("rogue_d2d_relay", &SimConfig::rogue_d2d_relay));
        t.push_back(member("uav_association_limit", &SimConfig::uav_association_limit));
        t.push_back(member("fallback_to_bs", &SimConfig::fallback_to_bs));
        t.push_back(member("greedy_forwarding", &SimConfig::greedy_forwarding));
        t.push_back(member("routing_range_fraction", &SimConfig::routing_range_fraction));
        t.push_back(member("validators", &SimConfig::validators));
        t.push_back(member("faulty_validators", &SimConfig::faulty_validators));
        t.push_back(member("n_providers", &SimConfig::n_providers));
        t.push_back(member("consensus_interval_s", &SimConfig::consensus_interval_s));
        t.push_back(member("auth_cache_ttl_s", &SimConfig::auth_cache_ttl_s));
        t.push_back(member("max_block_transactions", &SimConfig::max_block_transactions));
        t.push_back(member("uav_beacon_interval_s", &SimConfig::uav_beacon_interval_s));
        t.push_back(member("accounting_sample_flows", &SimConfig::accounting_sample_flows));
        t.push_back(member("accounting_pair_flows", &SimConfig::accounting_pair_flows));
        t.push_back(member("session_packets", &SimConfig::session_packets));
        return t;
    }();
    return table;
}

std::string fmt_value(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << v;
    return os.str();
}

void require(bool ok, const char* key, const std::string& message) {
    if (!ok) throw ConfigValidationError(key, message);
}

void require_positive(double v, const char* key) {
    require(std::isfinite(v) && v > 0.0, key, "must be > 0 (got " + fmt_value(v) + ")");
}

void require_non_negative(double v, const char* key) {
    require(std::isfinite(v) && v >= 0.0, key, "must be >= 0 (got " + fmt_value(v) + ")");
}

void require_probability(double v, const char* key) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, key, "must be in [0, 1] (got " + fmt_value(v) + ")");
}

}  // namespace

void validate(const SimConfig& c) {
    require(c.schema_version == kConfigSchemaVersion, "schema_version",
            "unsupported schema version " + std::to_string(c.schema_version) + " (expected " +
                std::to_string(kConfigSchemaVersion) + ")");
    require_positive(c.area_width_m, "area_width_m");
    require_positive(c.area_height_m, "area_height_m");
    require(c.n_nodes >= 0, "n_nodes", "must be >= 0 (got " + std::to_string(c.n_nodes) + ")");
    require(c.n_uavs >= 0, "n_uavs", "must be >= 0 (got " + std::to_string(c.n_uavs) + ")");
    require(c.n_bs >= 1, "n_bs", "must be >= 1 (got " + std::to_string(c.n_bs) + ")");
    require_non_negative(c.uav_altitude_m, "uav_altitude_m");
    require_non_negative(c.bs_height_m, "bs_height_m");
    require_positive(c.duration_s, "duration_s");
    require(c.cbr_packet_bytes > 0, "cbr_packet_bytes", "must be > 0");
    require_positive(c.cbr_interval_s, "cbr_interval_s");
    require_non_negative(c.tx_power_uav_w, "tx_power_uav_w");
    require_non_negative(c.tx_power_node_w, "tx_power_node_w");

    require_positive(c.node_speed_min_mps, "node_speed_min_mps");
    require(std::isfinite(c.node_speed_max_mps) && c.node_speed_max_mps >= c.node_speed_min_mps,
            "node_speed_max_mps", "must be >= node_speed_min_mps (got " + fmt_value(c.node_speed_max_mps) + ")");
    require_positive(c.mobility_tick_s, "mobility_tick_s");
    require_positive(c.reposition_interval_s, "reposition_interval_s");
    require_positive(c.density_cell_m, "density_cell_m");
    require_probability(c.reposition_jitter, "reposition_jitter");
    require_non_negative(c.reposition_speed_mps, "reposition_speed_mps");

    require_positive(c.n2d_range_m, "n2d_range_m");
    require_positive(c.d2d_range_m, "d2d_range_m");
    require_positive(c.n2b_range_m, "n2b_range_m");
    require_positive(c.d2b_range_m, "d2b_range_m");
    require_positive(c.path_loss_exponent, "path_loss_exponent");
    require_probability(c.success_uav_tx, "success_uav_tx");
    require_probability(c.success_node_tx, "success_node_tx");
    require_probability(c.success_bs_tx, "success_bs_tx");

    require_positive(c.admission_slot_s, "admission_slot_s");
    require(c.admission_slot_s <= c.cbr_interval_s, "admission_slot_s",
            "must not exceed cbr_interval_s (got " + fmt_value(c.admission_slot_s) + ")");
    require_positive(c.bs_capacity_pps, "bs_capacity_pps");
    require_non_negative(c.uav_capacity_pps, "uav_capacity_pps");

    require_probability(c.rogue_uav_fraction, "rogue_uav_fraction");
    require(c.uav_association_limit >= 0, "uav_association_limit",
            "must be >= 0 (got " + std::to_string(c.uav_association_limit) + ")");
    require(std::isfinite(c.routing_range_fraction) && c.routing_range_fraction > 0.0 && c.routing_range_fraction <= 1.0,
            "routing_range_fraction", "must be in (0, 1] (got " + fmt_value(c.routing_range_fraction) + ")");

    require(c.validators >= 1, "validators", "must be >= 1 (got " + std::to_string(c.validators) + ")");
    require(c.faulty_validators >= 0 && c.faulty_validators < c.validators, "faulty_validators",
            "must satisfy 0 <= faulty_validators < validators (got " + std::to_string(c.faulty_validators) + ")");
    require(c.n_providers >= 1, "n_providers", "must be >= 1 (got " + std::to_string(c.n_providers) + ")");
    require_positive(c.consensus_interval_s, "consensus_interval_s");
    require_non_negative(c.auth_cache_ttl_s, "auth_cache_ttl_s");
    require_non_negative(c.uav_beacon_interval_s, "uav_beacon_interval_s");
    require(c.max_block_transactions >= 0, "max_block_transactions",
            "must be >= 0 (got " + std::to_string(c.max_block_transactions) + ")");

    require(c.accounting_sample_flows >= 0, "accounting_sample_flows", "must be >= 0");
    require_non_negative(c.accounting_pair_flows, "accounting_pair_flows");
    require(c.session_packets >= 1, "session_packets",
            "must be >= 1 (got " + std::to_string(c.session_packets) + ")");
}

SimConfig load_config(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigParseError("config document must be a JSON object");

    SimConfig config;
    for (const auto& [key, value] : doc.items()) {
        const auto& table = fields();
        auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.name == key; });
        if (it == table.end()) throw ConfigValidationError(key, "unknown key");
        try {
            it->read(config, value);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigParseError(key + ": " + e.what());
        }
    }
    validate(config);
    return config;
}

SimConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigParseError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config(buf.str());
}

std::string dump_config(const SimConfig& config) {
    ordered_json doc = ordered_json::object();
    for (const auto& f : fields()) doc[f.name] = f.write(config);
    return doc.dump(2) + "\n";
}

int accounted_flows(const SimConfig& config) {
    const double pairs = static_cast<double>(config.n_nodes) * static_cast<double>(std::max(config.n_nodes - 1, 0));
    if (config.n_nodes < 2) return 0;
    return config.accounting_sample_flows + static_cast<int>(std::llround(config.accounting_pair_flows * pairs));
}

int accounted_sessions(const SimConfig& config) {
    const int flows = accounted_flows(config);
    return (flows + config.session_packets - 1) / config.session_packets;
}

}  // namespace uavsim
