#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mpcc/cli.hpp"

using namespace mpcc;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "mpcc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

/// Fresh scratch directory, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("mpcc_cli_" + name)) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const { return (sub.empty() ? path : path / sub).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string config(const std::string& name) { return (fs::path(MPCC_TEST_CONFIG_DIR) / name).string(); }

const std::vector<std::string> kCheapFairness = {"--set", "fairness.samples=200", "--set", "fairness.horizon=60"};

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run({"--bogus"}).code == 1);
    CHECK(run({"simulate", "--bogus"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"--preset", "fig99"}).code == 1);
    CHECK(run({"--preset", "fig99"}).err.find("fig2") != std::string::npos);
    CHECK(run({"sweep", "--preset", "fig2"}).code == 1);
    CHECK(run({"--help"}).code == 0);

    const auto bad_key = run({"equilibrium", "--set", "protocol.mm=0.1", "--out", "unused"});
    CHECK(bad_key.code == 1);
    CHECK(bad_key.err.find("protocol.mm") != std::string::npos);

    const auto missing = run({"equilibrium", "--config", "/nonexistent/x.toml"});
    CHECK(missing.code == 1);
}

TEST_CASE("invalid parameters exit with 1 and name the key") {
    TempDir dir("invalid");
    const auto r = run({"equilibrium", "--set", "protocol.beta=1.5", "--out", dir.str()});
    CHECK(r.code == 1);
    CHECK(r.err.find("beta") != std::string::npos);
}

TEST_CASE("numerical failures exit with 2") {
    TempDir dir("numeric");
    CHECK(run({"equilibrium", "--set", "protocol.m=1", "--out", dir.str()}).code == 2);
}

TEST_CASE("equilibrium writes its tables") {
    TempDir dir("equilibrium");
    const auto r = run({"equilibrium", "--out", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(first_line(dir.path / "equilibrium.csv") == "rank,agents,alpha_hat,flow");
    const auto summary = slurp(dir.path / "equilibrium_summary.csv");
    CHECK(summary.find("classification,lossless") != std::string::npos);
    CHECK(r.out.find("wrote") != std::string::npos);
}

TEST_CASE("simulate writes traces, summaries and charts") {
    TempDir dir("simulate");
    const auto r = run({"simulate", "--config", config("fig10a.toml"), "--set", "run.ensemble=3", "--set",
                        "run.horizon=60", "--out", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(first_line(dir.path / "summary.csv") ==
          "run,seed_stream,min_flow,max_flow,lower_type1,lower_type2,upper");
    CHECK(first_line(dir.path / "ensemble.csv") == "t,rank,mean_flow,expected_flow");
    CHECK(fs::exists(dir.path / "trace.csv"));
    CHECK(fs::exists(dir.path / "expected.csv"));
    CHECK(slurp(dir.path / "flows.svg").find("<polyline") != std::string::npos);
}

TEST_CASE("sweep writes ranges and band charts") {
    TempDir dir("sweep");
    const auto r = run({"sweep", "--config", config("fig6.toml"), "--set", "sweep.m_step=0.08", "--set",
                        "sweep.r_step=0.1", "--out", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(first_line(dir.path / "sweep.csv") ==
          "m,r,class,delta_eps,delta_lambda,delta_gamma,delta_eta,eta_stderr");
    for (const std::string metric : {"epsilon", "lambda", "gamma", "eta"}) {
        CHECK(first_line(dir.path / ("ranges_" + metric + ".csv")) == "m,class,delta_min,delta_max");
    }
    CHECK(slurp(dir.path / "band_epsilon.svg").find("<polygon") != std::string::npos);
    CHECK(slurp(dir.path / "band_lambda.svg").find("<polygon") != std::string::npos);
}

TEST_CASE("flag overrides shadow the config, last one wins") {
    TempDir a("override_a");
    TempDir b("override_b");
    REQUIRE(run({"equilibrium", "--config", config("fig4.toml"), "--set", "protocol.r=0.9", "--set", "protocol.r=0.5",
                 "--out", a.str()})
                .code == 0);
    REQUIRE(run({"equilibrium", "--config", config("fig4.toml"), "--set", "protocol.r=0.5", "--out", b.str()}).code ==
            0);
    CHECK(slurp(a.path / "equilibrium.csv") == slurp(b.path / "equilibrium.csv"));
}

TEST_CASE("identical inputs give byte-identical artifacts") {
    TempDir a("determinism_a");
    TempDir b("determinism_b");
    const std::vector<std::string> base = {"simulate", "--config", config("fig10b.toml"), "--seed", "77",
                                           "--set",    "run.ensemble=4", "--set", "run.horizon=80"};
    auto args_a = base;
    args_a.insert(args_a.end(), {"--out", a.str()});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out", b.str()});
    REQUIRE(run(args_a).code == 0);
    REQUIRE(run(args_b).code == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a.path)) {
        INFO(entry.path().filename().string());
        CHECK(slurp(entry.path()) == slurp(b.path / entry.path().filename()));
        ++files;
    }
    CHECK(files >= 5);

    TempDir c("determinism_c");
    auto args_c = base;
    args_c[4] = "78";
    args_c.insert(args_c.end(), {"--out", c.str()});
    REQUIRE(run(args_c).code == 0);
    CHECK(slurp(a.path / "trace.csv") != slurp(c.path / "trace.csv"));
}

TEST_CASE("every preset runs from the shipped configs") {
    for (const auto& preset : presets()) {
        INFO(preset.name);
        TempDir dir("preset_" + preset.name);
        std::vector<std::string> args = {"--preset", preset.name, "--out", dir.str()};
        args.insert(args.end(), kCheapFairness.begin(), kCheapFairness.end());
        const auto r = run(args);
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        std::size_t written = 0;
        for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir.path)) ++written;
        CHECK(written > 0);
        CHECK(parse_command(to_string(preset.command)) == preset.command);
    }
}

TEST_CASE("preset outputs") {
    SUBCASE("agent guides on the expected run") {
        TempDir dir("fig2");
        REQUIRE(run({"--preset", "fig2", "--out", dir.str()}).code == 0);
        CHECK(fs::exists(dir.path / "expected_2.csv"));
        const auto svg = slurp(dir.path / "agents.svg");
        CHECK(svg.find("stroke-dasharray=\"2,3\"") != std::string::npos);
    }
    SUBCASE("consistency map") {
        TempDir dir("fig13");
        REQUIRE(run({"--preset", "fig13", "--out", dir.str()}).code == 0);
        CHECK(first_line(dir.path / "consistency.csv") == "m,r,P,alpha_kind,consistent");
        CHECK(fs::exists(dir.path / "consistency.svg"));
    }
    SUBCASE("fairness series") {
        TempDir dir("fig16");
        std::vector<std::string> args = {"--preset", "fig16", "--out", dir.str()};
        args.insert(args.end(), kCheapFairness.begin(), kCheapFairness.end());
        REQUIRE(run(args).code == 0);
        CHECK(first_line(dir.path / "fairness_series.csv") == "t,p_loss,variance");
        CHECK(first_line(dir.path / "rating.csv") ==
              "m,r,P,alpha_kind,beta,classification,epsilon,lambda,gamma,eta,eta_stderr");
    }
    SUBCASE("compare") {
        TempDir dir("compare");
        std::vector<std::string> args = {"compare", "--out", dir.str()};
        args.insert(args.end(), kCheapFairness.begin(), kCheapFairness.end());
        REQUIRE(run(args).code == 0);
        CHECK(first_line(dir.path / "compare.csv") == "metric,mpcc,baseline,delta");
    }
}
