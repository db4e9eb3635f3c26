#include "uavsim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "uavsim/chain_io.hpp"
#include "uavsim/engine.hpp"
#include "uavsim/sweep.hpp"

namespace uavsim {

namespace {

struct CommonOptions {
    std::string config_path;
    std::string scheme;
    std::optional<int> nodes;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--config", o.config_path,
                   std::string("Config file (\"defaults\" for the built-in defaults; falls back to $") + kConfigEnvVar +
                       ")");
    cmd.add_option("--scheme", o.scheme, "n2n-bs | n2n-uav-no-bc | n2n-uav-bc");
    cmd.add_option("--nodes", o.nodes, "Number of mobile nodes");
    cmd.add_option("--seed", o.seed, "Random seed");
}

SimConfig base_config(const CommonOptions& o) {
    std::string path = o.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar); env && *env) path = env;
    }
    if (path.empty() || path == "defaults") return SimConfig{};
    return load_config_file(path);
}

Scheme scheme_option(const std::string& name) {
    auto s = parse_scheme(name);
    if (!s) throw ConfigValidationError("scheme", "unknown scheme '" + name + "'");
    return *s;
}

SimConfig with_overrides(SimConfig c, const CommonOptions& o) {
    if (!o.scheme.empty()) c.scheme = scheme_option(o.scheme);
    if (o.nodes) c.n_nodes = *o.nodes;
    if (o.seed) c.seed = *o.seed;
    validate(c);
    return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

int cmd_run(const CommonOptions& o, const std::string& chain_out, std::ostream& out, std::ostream& err) {
    const SimConfig config = with_overrides(base_config(o), o);
    const RunResult result = run_with_ledger(config);
    if (!chain_out.empty()) {
        std::filesystem::create_directories(chain_out);
        write_file(std::filesystem::path(chain_out) / "private.chain", export_chain(result.private_chain));
        write_file(std::filesystem::path(chain_out) / "public.chain", export_chain(result.public_chain));
    }
    if (result.report.flows_total == 0) {
        err << "error: the run sampled no flows, so the delivery success rate is undefined (n_nodes must be >= 2)\n";
        return kExitValidation;
    }
    const MetricsReport reports[] = {result.report};
    out << to_csv(reports);
    return kExitOk;
}

int cmd_sweep(const CommonOptions& o, int replicate, int workers, const std::string& out_dir, std::ostream& out) {
    SimConfig base = base_config(o);
    if (o.seed) base.seed = *o.seed;
    SweepSpec spec = default_sweep(base, replicate);
    if (!o.scheme.empty()) spec.schemes = {scheme_option(o.scheme)};
    if (o.nodes) spec.node_counts = {*o.nodes};
    const SweepResult result = run_sweep(spec, workers);
    write_sweep_outputs(result, out_dir);
    out << sweep_csv(result);
    return kExitOk;
}

int cmd_verify_chain(const std::string& path, std::ostream& out, std::ostream& err) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot read " << path << "\n";
        return kExitParse;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    const Chain chain = import_chain(buf.str());
    if (auto bad = first_invalid_block(chain)) {
        err << "chain verification failed at block " << *bad << "\n";
        return kExitVerification;
    }
    out << "chain ok: " << chain.blocks.size() << " blocks\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"UAV relay delivery simulator with ledger-backed authentication", "uavsim"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::string chain_out;
    auto* run_cmd = app.add_subcommand("run", "Execute one run and print its CSV row");
    add_common(*run_cmd, run_opts);
    run_cmd->add_option("--chain-out", chain_out, "Directory for private.chain and public.chain exports");

    CommonOptions sweep_opts;
    int replicate = 5;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string out_dir = "sweep-out";
    auto* sweep_cmd = app.add_subcommand("sweep", "Density sweep over node counts, schemes and seeds");
    add_common(*sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--replicate", replicate, "Seeds per point");
    sweep_cmd->add_option("--workers", workers, "Concurrent runs");
    sweep_cmd->add_option("--out", out_dir, "Output directory");

    std::string chain_path;
    auto* verify_cmd = app.add_subcommand("verify-chain", "Verify an exported chain");
    verify_cmd->add_option("path", chain_path, "Chain export file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (*run_cmd) return cmd_run(run_opts, chain_out, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep_opts, replicate, workers, out_dir, out);
        return cmd_verify_chain(chain_path, out, err);
    } catch (const ConfigValidationError& e) {
        err << "error: invalid configuration: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ConfigParseError& e) {
        err << "error: cannot parse configuration: " << e.what() << "\n";
        return kExitParse;
    } catch (const ChainParseError& e) {
        err << "error: cannot parse chain export: " << e.what() << "\n";
        return kExitParse;
    }
}

}  // namespace uavsim
