#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uavsim/types.hpp"

namespace uavsim {

constexpr int kConfigSchemaVersion = 1;
constexpr std::uint64_t kDefaultSeed = 42;

/// Thrown when a config document cannot be parsed (malformed JSON, wrong value types).
class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a config parses but breaks an invariant; names the offending key.
class ConfigValidationError : public std::runtime_error {
public:
    ConfigValidationError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

enum class RogueMobility { Random, Density };

/// Full scenario parameterization. Field defaults are the shipped calibration
/// (config/default.json mirrors them and a test keeps the two in sync).
struct SimConfig {
    int schema_version = kConfigSchemaVersion;

    // Scenario.
    double area_width_m = 1500.0;
    double area_height_m = 1500.0;
    int n_nodes = 100;
    int n_uavs = 20;
    int n_bs = 1;
    double uav_altitude_m = 50.0;
    double bs_height_m = 25.0;
    double duration_s = 60.0;
    int cbr_packet_bytes = 512;
    double cbr_interval_s = 0.010;
    double tx_power_uav_w = 0.1;
    double tx_power_node_w = 0.01;
    Scheme scheme = Scheme::N2N_UAV_BC;
    std::uint64_t seed = kDefaultSeed;

    // Mobility.
    double node_speed_min_mps = 1.0;
    double node_speed_max_mps = 5.0;
    double mobility_tick_s = 1.0;
    double reposition_interval_s = 5.0;
    double density_cell_m = 150.0;
    /// UAV landing offset, as a fraction of the cell size, around the chosen cell center.
    double reposition_jitter = 0.25;
    /// 0 repositions instantly; > 0 flies toward the target at this speed.
    double reposition_speed_mps = 0.0;

    // Channel. Range and base success are per link class; base success is
    // keyed by the transmitter's power class.
    double n2d_range_m = 350.0;
    double d2d_range_m = 1000.0;
    double n2b_range_m = 2500.0;
    double d2b_range_m = 2500.0;
    double path_loss_exponent = 12.0;
    double success_uav_tx = 1.0;
    double success_node_tx = 0.998;
    double success_bs_tx = 0.93;

    // Relay congestion (slotted admission).
    double admission_slot_s = 0.0003;
    double bs_capacity_pps = 7000.0;
    /// 0 disables UAV relay congestion.
    double uav_capacity_pps = 5750.0;

    // Routing and adversary.
    double rogue_uav_fraction = 0.2;
    RogueMobility rogue_mobility = RogueMobility::Random;
    /// Whether rogue UAVs join UAV-to-UAV forwarding. When false they only
    /// lure ground nodes as an access point.
    bool rogue_d2d_relay = false;
    /// Most nodes a legitimate UAV serves as access point; nodes beyond it
    /// use another UAV in range or the base station. 0 means no limit.
    /// Rogue UAVs accept every node.
    int uav_association_limit = 3;
    bool fallback_to_bs = true;
    bool greedy_forwarding = true;
    /// Routing only uses links shorter than this fraction of the radio range
    /// (neighbor discovery ignores UAVs heard over marginal links).
    double routing_range_fraction = 0.65;
    /// Period of the position beacon every UAV broadcasts to keep greedy
    /// forwarding tables current; 0 disables beacons. UAV schemes only.
    double uav_beacon_interval_s = 20.0;

    // Ledger.
    int validators = 4;
    int faulty_validators = 0;
    int n_providers = 2;
    double consensus_interval_s = 20.0;
    /// Most receipts one block carries; a round commits as many blocks as
    /// its backlog needs. 0 puts the whole backlog in one block.
    int max_block_transactions = 35;
    /// Lifetime of an authentication verdict; 0 re-authenticates on every use.
    double auth_cache_ttl_s = 60.0;

    // Accounting sample.
    int accounting_sample_flows = 250;
    double accounting_pair_flows = 0.05;
    int session_packets = 1;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Throws ConfigValidationError on the first broken invariant.
void validate(const SimConfig& config);

/// Parses a JSON config document. Missing keys keep their defaults; unknown
/// keys are rejected. The result is validated.
SimConfig load_config(std::string_view text);

SimConfig load_config_file(const std::filesystem::path& path);

/// Canonical JSON rendering with every key (stable key order).
std::string dump_config(const SimConfig& config);

std::string_view rogue_mobility_name(RogueMobility m);

/// Sampled end-to-end flows (packets) accounted in a run of `n_nodes` nodes.
int accounted_flows(const SimConfig& config);

/// Number of sessions the accounted flows are grouped into.
int accounted_sessions(const SimConfig& config);

}  // namespace uavsim
