#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uavsim/cli.hpp"

using namespace uavsim;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "uavsim_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string read(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("run prints one csv row") {
    const auto r = cli({"run", "--config", "defaults", "--scheme", "n2n-bs", "--nodes", "10", "--seed", "5"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("scheme,n_nodes,seed,", 0) == 0);
    CHECK(r.out.find("\nn2n-bs,10,5,") != std::string::npos);
}

TEST_CASE("usage errors exit with the parse code") {
    CHECK(cli({}).code == kExitParse);
    CHECK(cli({"fly"}).code == kExitParse);
    CHECK(cli({"run", "--nodes", "many"}).code == kExitParse);
    CHECK(cli({"verify-chain"}).code == kExitParse);
    CHECK(cli({"run", "--config", "/nonexistent/config.json"}).code == kExitParse);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("invalid configurations exit with the validation code") {
    CHECK(cli({"run", "--config", "defaults", "--nodes", "0"}).code == kExitValidation);
    CHECK(cli({"run", "--config", "defaults", "--nodes", "1"}).code == kExitValidation);
    CHECK(cli({"run", "--config", "defaults", "--nodes", "-3"}).code == kExitValidation);
    const auto bad = cli({"run", "--config", "defaults", "--scheme", "n2n-magic"});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.err.find("scheme") != std::string::npos);
    const auto path = scratch("bad.json");
    write(path, R"({"duration_s": 0})");
    const auto r = cli({"run", "--config", path.string()});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("duration_s") != std::string::npos);
    CHECK(cli({"sweep", "--config", "defaults", "--replicate", "0", "--out", scratch("sw").string()}).code ==
          kExitValidation);
}

TEST_CASE("exported chains verify and tampering is detected") {
    const auto dir = scratch("chains");
    std::filesystem::remove_all(dir);
    const auto r = cli({"run", "--config", "defaults", "--scheme", "n2n-uav-bc", "--nodes", "20", "--seed", "3",
                        "--chain-out", dir.string()});
    REQUIRE(r.code == kExitOk);
    for (const char* name : {"private.chain", "public.chain"}) {
        const auto ok = cli({"verify-chain", (dir / name).string()});
        CHECK(ok.code == kExitOk);
        CHECK(ok.out.rfind("chain ok: ", 0) == 0);
    }

    std::string text = read(dir / "public.chain");
    const auto pos = text.find("\"packets_delivered\":1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 21, "\"packets_delivered\":0");
    write(dir / "tampered.chain", text);
    const auto bad = cli({"verify-chain", (dir / "tampered.chain").string()});
    CHECK(bad.code == kExitVerification);
    CHECK(bad.err.find("block") != std::string::npos);

    write(dir / "empty.chain", "");
    CHECK(cli({"verify-chain", (dir / "empty.chain").string()}).code == kExitParse);
    write(dir / "garbage.chain", "{not json\n");
    CHECK(cli({"verify-chain", (dir / "garbage.chain").string()}).code == kExitParse);
    CHECK(cli({"verify-chain", (dir / "missing.chain").string()}).code == kExitParse);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep writes the four output files") {
    const auto dir = scratch("sweep");
    std::filesystem::remove_all(dir);
    const auto cfg = scratch("short.json");
    write(cfg, R"({"duration_s": 5})");
    const auto r = cli({"sweep", "--config", cfg.string(), "--replicate", "1", "--workers", "1", "--nodes", "20",
                        "--out", dir.string()});
    CHECK(r.code == kExitOk);
    for (const char* name : {"runs.csv", "sweep.csv", "success_series.csv", "messages_series.csv"}) {
        CHECK(std::filesystem::exists(dir / name));
    }
    CHECK(r.out.rfind("scheme,n_nodes,replicates,", 0) == 0);
    std::filesystem::remove_all(dir);
}
