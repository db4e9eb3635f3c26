#include "uavsim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "uavsim/engine.hpp"

namespace uavsim {

std::vector<std::uint64_t> replicate_seeds(std::uint64_t base_seed, int replicate) {
    if (replicate < 1) throw ConfigValidationError("replicate", "must be >= 1 (got " + std::to_string(replicate) + ")");
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < replicate; ++r) seeds.push_back(base_seed + static_cast<std::uint64_t>(r));
    return seeds;
}

SweepSpec default_sweep(const SimConfig& base, int replicate) {
    SweepSpec spec;
    for (int n = 10; n <= 100; n += 10) spec.node_counts.push_back(n);
    spec.schemes = {Scheme::N2N_BS, Scheme::N2N_UAV_NO_BC, Scheme::N2N_UAV_BC};
    spec.seeds = replicate_seeds(base.seed, replicate);
    spec.base_config = base;
    return spec;
}

SimConfig point_config(const SweepSpec& spec, Scheme scheme, int n_nodes, std::uint64_t seed) {
    SimConfig c = spec.base_config;
    c.scheme = scheme;
    c.n_nodes = n_nodes;
    c.seed = seed;
    return c;
}

void validate_sweep(const SweepSpec& spec) {
    if (spec.node_counts.empty()) throw ConfigValidationError("nodes", "sweep needs at least one node count");
    if (spec.schemes.empty()) throw ConfigValidationError("scheme", "sweep needs at least one scheme");
    if (spec.seeds.empty()) throw ConfigValidationError("seed", "sweep needs at least one seed");
    for (std::size_t i = 0; i < spec.node_counts.size(); ++i) {
        if (spec.node_counts[i] < 2) {
            throw ConfigValidationError("nodes", "sweep node counts must be >= 2 (got " +
                                                     std::to_string(spec.node_counts[i]) + ")");
        }
        if (i > 0 && spec.node_counts[i] <= spec.node_counts[i - 1]) {
            throw ConfigValidationError("nodes", "sweep node counts must be strictly increasing");
        }
    }
    for (Scheme s : spec.schemes) {
        for (int n : spec.node_counts) {
            for (std::uint64_t seed : spec.seeds) validate(point_config(spec, s, n, seed));
        }
    }
}

Summary summarize(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("summarize: no samples");
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / static_cast<double>(samples.size());
    if (samples.size() == 1) return {mean, 0.0};
    double sq = 0.0;
    for (double v : samples) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / static_cast<double>(samples.size() - 1))};
}

SweepResult run_sweep(const SweepSpec& spec, int workers) {
    validate_sweep(spec);
    if (workers < 1) throw ConfigValidationError("workers", "must be >= 1 (got " + std::to_string(workers) + ")");

    std::vector<SimConfig> jobs;
    for (Scheme s : spec.schemes) {
        for (int n : spec.node_counts) {
            for (std::uint64_t seed : spec.seeds) jobs.push_back(point_config(spec, s, n, seed));
        }
    }

    SweepResult result;
    result.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                result.runs[i] = run(jobs[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(workers), jobs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    const std::size_t per_point = spec.seeds.size();
    for (std::size_t p = 0; p * per_point < result.runs.size(); ++p) {
        std::vector<double> rates;
        std::vector<double> messages;
        for (std::size_t k = 0; k < per_point; ++k) {
            const auto& r = result.runs[p * per_point + k];
            if (r.flows_total > 0) rates.push_back(delivery_success_rate(r));
            messages.push_back(static_cast<double>(total_messages(r)));
        }
        SweepPoint point;
        point.scheme = result.runs[p * per_point].config_echo.scheme;
        point.n_nodes = result.runs[p * per_point].config_echo.n_nodes;
        if (!rates.empty()) point.success_rate = summarize(rates);
        point.total_messages = summarize(messages);
        result.points.push_back(point);
    }
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = "scheme,n_nodes,replicates,success_rate_mean,success_rate_stdev,total_messages_mean,"
                      "total_messages_stdev\n";
    const std::size_t replicates = result.points.empty() ? 0 : result.runs.size() / result.points.size();
    for (const auto& p : result.points) {
        out += scheme_name(p.scheme);
        out += ',' + std::to_string(p.n_nodes) + ',' + std::to_string(replicates) + ',';
        if (p.success_rate) out += format_fixed(p.success_rate->mean) + ',' + format_fixed(p.success_rate->stdev);
        else out += ',';
        out += ',' + format_fixed(p.total_messages.mean) + ',' + format_fixed(p.total_messages.stdev) + '\n';
    }
    return out;
}

std::string success_series_csv(const SweepResult& result) {
    std::string out = "scheme,x,y,stdev\n";
    for (const auto& p : result.points) {
        out += scheme_name(p.scheme);
        out += ',' + std::to_string(p.n_nodes) + ',';
        if (p.success_rate) out += format_fixed(p.success_rate->mean) + ',' + format_fixed(p.success_rate->stdev);
        else out += ',';
        out += '\n';
    }
    return out;
}

std::string messages_series_csv(const SweepResult& result) {
    std::string out = "scheme,x,y,stdev\n";
    for (const auto& p : result.points) {
        out += scheme_name(p.scheme);
        out += ',' + std::to_string(p.n_nodes) + ',' + format_fixed(p.total_messages.mean) + ',' +
               format_fixed(p.total_messages.stdev) + '\n';
    }
    return out;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        f << text;
    };
    write("runs.csv", to_csv(result.runs));
    write("sweep.csv", sweep_csv(result));
    write("success_series.csv", success_series_csv(result));
    write("messages_series.csv", messages_series_csv(result));
}

}  // namespace uavsim
