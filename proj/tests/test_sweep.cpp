#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavsim/engine.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/sweep.hpp"

using namespace uavsim;

namespace {

SweepSpec small_spec() {
    SimConfig base;
    base.duration_s = 10.0;
    base.seed = 100;
    SweepSpec spec = default_sweep(base, 2);
    spec.node_counts = {10, 30};
    return spec;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

std::string key_of(const SweepSpec& spec) {
    try {
        validate_sweep(spec);
    } catch (const ConfigValidationError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST_CASE("default sweep covers ten node counts, three schemes and consecutive seeds") {
    SimConfig base;
    base.seed = 42;
    const SweepSpec spec = default_sweep(base, 5);
    CHECK(spec.node_counts == std::vector<int>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
    CHECK(spec.schemes.size() == 3);
    CHECK(spec.seeds == std::vector<std::uint64_t>{42, 43, 44, 45, 46});
    CHECK_THROWS_AS(replicate_seeds(1, 0), ConfigValidationError);
    const SimConfig p = point_config(spec, Scheme::N2N_BS, 70, 44);
    CHECK(p.scheme == Scheme::N2N_BS);
    CHECK(p.n_nodes == 70);
    CHECK(p.seed == 44);
}

TEST_CASE("summary matches a direct mean and sample deviation") {
    Rng rng = rng_stream(1, "summary");
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xs(1 + rng.index(12));
        for (auto& x : xs) x = rng.uniform(-50.0, 150.0);
        double mean = 0.0;
        for (double x : xs) mean += x / static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
        const Summary s = summarize(xs);
        CHECK(s.mean == doctest::Approx(mean));
        CHECK(s.stdev == doctest::Approx(sd));
    }
    CHECK(summarize({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}).stdev == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("the whole spec is validated before any run") {
    SweepSpec spec = small_spec();
    CHECK(key_of(spec).empty());
    spec.node_counts = {10, 1};
    CHECK(key_of(spec) == "nodes");
    spec.node_counts = {20, 10};
    CHECK(key_of(spec) == "nodes");
    spec = small_spec();
    spec.schemes.clear();
    CHECK(key_of(spec) == "scheme");
    spec = small_spec();
    spec.seeds.clear();
    CHECK(key_of(spec) == "seed");
    spec = small_spec();
    spec.base_config.duration_s = -1.0;
    CHECK(key_of(spec) == "duration_s");
    CHECK_THROWS_AS(run_sweep(spec), ConfigValidationError);
    CHECK_THROWS_AS(run_sweep(small_spec(), 0), ConfigValidationError);
}

TEST_CASE("sweep runs and points follow the spec order and agree with single runs") {
    const SweepSpec spec = small_spec();
    const SweepResult r = run_sweep(spec, 1);
    REQUIRE(r.runs.size() == 3 * 2 * 2);
    REQUIRE(r.points.size() == 3 * 2);
    std::size_t k = 0;
    for (Scheme s : spec.schemes) {
        for (int n : spec.node_counts) {
            std::vector<double> rates;
            std::vector<double> messages;
            for (std::uint64_t seed : spec.seeds) {
                const auto& report = r.runs[k++];
                CHECK(report == run(point_config(spec, s, n, seed)));
                rates.push_back(delivery_success_rate(report));
                messages.push_back(static_cast<double>(total_messages(report)));
            }
            const auto& p = r.points[(k / spec.seeds.size()) - 1];
            CHECK(p.scheme == s);
            CHECK(p.n_nodes == n);
            REQUIRE(p.success_rate.has_value());
            CHECK(p.success_rate->mean == doctest::Approx(summarize(rates).mean));
            CHECK(p.success_rate->stdev == doctest::Approx(summarize(rates).stdev));
            CHECK(p.total_messages.mean == doctest::Approx(summarize(messages).mean));
        }
    }
}

TEST_CASE("outputs are byte-identical for any worker count") {
    const auto root = std::filesystem::temp_directory_path() / "uavsim_test_sweep";
    std::filesystem::remove_all(root);
    const SweepSpec spec = small_spec();
    write_sweep_outputs(run_sweep(spec, 1), root / "one");
    write_sweep_outputs(run_sweep(spec, 3), root / "three");
    for (const char* name : {"runs.csv", "sweep.csv", "success_series.csv", "messages_series.csv"}) {
        const auto a = read_file(root / "one" / name);
        CHECK_FALSE(a.empty());
        CHECK(a == read_file(root / "three" / name));
    }
    CHECK(read_file(root / "one" / "success_series.csv").rfind("scheme,x,y,stdev\n", 0) == 0);
    std::filesystem::remove_all(root);
}
