#include "uavsim/metrics.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace uavsim {

bool outcomes_conserved(const MetricsReport& r) {
    return r.delivered_authentic + r.delivered_compromised + r.dropped == r.flows_total;
}

double delivery_success_rate(const MetricsReport& r) {
    if (r.flows_total == 0) throw UndefinedMetricError("delivery success rate is undefined for a run with no flows");
    return 100.0 * static_cast<double>(r.delivered_authentic) / static_cast<double>(r.flows_total);
}

std::uint64_t total_messages(const MetricsReport& r) {
    return r.data_transmissions + r.control_messages + r.consensus_messages;
}

std::string format_fixed(double value, int decimals) {
    std::array<char, 128> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) throw std::invalid_argument("value cannot be formatted");
    return std::string(buf.data(), ptr);
}

std::string to_csv(std::span<const MetricsReport> reports) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : reports) {
        const SimConfig& c = r.config_echo;
        out += scheme_name(c.scheme);
        out += ',' + std::to_string(c.n_nodes);
        out += ',' + std::to_string(c.seed);
        out += ',';
        if (r.flows_total > 0) out += format_fixed(delivery_success_rate(r));
        for (std::uint64_t v : {total_messages(r), r.flows_total, r.delivered_authentic, r.delivered_compromised,
                                r.dropped, r.data_transmissions, r.control_messages, r.consensus_messages}) {
            out += ',' + std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!header_seen) {
            if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 12) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 12 fields");
        CsvRow r;
        auto scheme = parse_scheme(f[0]);
        if (!scheme) throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown scheme");
        r.scheme = *scheme;
        r.n_nodes = parse_number<int>(f[1], line_no);
        r.seed = parse_number<std::uint64_t>(f[2], line_no);
        if (!f[3].empty()) r.success_rate = parse_number<double>(f[3], line_no);
        std::uint64_t* counters[] = {&r.total_messages, &r.flows_total, &r.delivered_authentic,
                                     &r.delivered_compromised, &r.dropped, &r.data_transmissions,
                                     &r.control_messages, &r.consensus_messages};
        for (std::size_t i = 0; i < 8; ++i) *counters[i] = parse_number<std::uint64_t>(f[4 + i], line_no);
        rows.push_back(r);
    }
    if (!header_seen) throw std::invalid_argument("missing CSV header");
    return rows;
}

}  // namespace uavsim
