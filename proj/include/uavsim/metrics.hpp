#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavsim/config.hpp"

namespace uavsim {

/// Raised when a metric is queried on a run that sampled no flows.
class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct MetricsReport {
    SimConfig config_echo;
    std::uint64_t flows_total = 0;
    std::uint64_t delivered_authentic = 0;
    std::uint64_t delivered_compromised = 0;
    std::uint64_t dropped = 0;
    std::uint64_t data_transmissions = 0;
    std::uint64_t control_messages = 0;
    std::uint64_t consensus_messages = 0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// delivered_authentic + delivered_compromised + dropped == flows_total.
bool outcomes_conserved(const MetricsReport& report);

/// Percentage of flows delivered authentically; throws UndefinedMetricError for zero flows.
double delivery_success_rate(const MetricsReport& report);

std::uint64_t total_messages(const MetricsReport& report);

/// Column order of to_csv.
inline constexpr std::string_view kCsvHeader =
    "scheme,n_nodes,seed,success_rate,total_messages,flows_total,delivered_authentic,delivered_compromised,"
    "dropped,data_transmissions,control_messages,consensus_messages";

/// Header plus one row per report. Rates use six fixed decimals with '.' as
/// separator; an undefined success rate is an empty field.
std::string to_csv(std::span<const MetricsReport> reports);

/// One parsed to_csv row.
struct CsvRow {
    Scheme scheme = Scheme::N2N_BS;
    int n_nodes = 0;
    std::uint64_t seed = 0;
    std::optional<double> success_rate;
    std::uint64_t total_messages = 0;
    std::uint64_t flows_total = 0;
    std::uint64_t delivered_authentic = 0;
    std::uint64_t delivered_compromised = 0;
    std::uint64_t dropped = 0;
    std::uint64_t data_transmissions = 0;
    std::uint64_t control_messages = 0;
    std::uint64_t consensus_messages = 0;

    friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

/// Parses to_csv output; throws std::invalid_argument on a malformed document.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Locale-independent fixed-point rendering with `decimals` digits.
std::string format_fixed(double value, int decimals = 6);

}  // namespace uavsim
