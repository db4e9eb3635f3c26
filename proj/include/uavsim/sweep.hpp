#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/config.hpp"
#include "uavsim/metrics.hpp"

namespace uavsim {

struct SweepSpec {
    std::vector<int> node_counts;
    std::vector<Scheme> schemes;
    std::vector<std::uint64_t> seeds;
    SimConfig base_config;
};

/// Node counts 10, 20, ..., 100, all three schemes, seeds base, base+1, ...
SweepSpec default_sweep(const SimConfig& base, int replicate);

/// Seeds base_seed, base_seed+1, ..., base_seed+replicate-1.
std::vector<std::uint64_t> replicate_seeds(std::uint64_t base_seed, int replicate);

/// Config of one sweep point.
SimConfig point_config(const SweepSpec& spec, Scheme scheme, int n_nodes, std::uint64_t seed);

/// Checks the spec and every point config before anything runs. Throws
/// ConfigValidationError naming the offending key.
void validate_sweep(const SweepSpec& spec);

/// Mean and sample standard deviation (0 for a single sample).
struct Summary {
    double mean = 0.0;
    double stdev = 0.0;
};

Summary summarize(const std::vector<double>& samples);

struct SweepPoint {
    Scheme scheme = Scheme::N2N_BS;
    int n_nodes = 0;
    /// Undefined when every replicate sampled zero flows.
    std::optional<Summary> success_rate;
    Summary total_messages;
};

struct SweepResult {
    /// One report per (scheme, node count, seed) in that nesting order.
    std::vector<MetricsReport> runs;
    /// One point per (scheme, node count) in spec order.
    std::vector<SweepPoint> points;
};

/// Validates the whole spec, then runs every combination on up to `workers`
/// threads. Results are ordered by the spec, never by completion.
SweepResult run_sweep(const SweepSpec& spec, int workers = 1);

/// Per-point aggregate table.
std::string sweep_csv(const SweepResult& result);

/// Plot series: header "scheme,x,y,stdev" and one row per point.
std::string success_series_csv(const SweepResult& result);
std::string messages_series_csv(const SweepResult& result);

/// Writes runs.csv, sweep.csv, success_series.csv and messages_series.csv into `dir`.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace uavsim
