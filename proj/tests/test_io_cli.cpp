#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "fitchoice/cli.hpp"
#include "fitchoice/io.hpp"
#include "fitchoice/simulation.hpp"

using namespace fitchoice;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("fitchoice_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("G1 checkpoint record") {
    const ModelParams p(0.0, 2, 1.9, 0.5);
    const auto cp = snapshot(init_state(p, 1, RootFitness{FitnessClass::Low, FitnessClass::High}));
    CHECK(io::serialize_checkpoint(cp) ==
          R"({"n":1,"M":1,"M1":1,"Mlambda":1,"X":1.9,"Z":1.0,"hub_low":0,"hub_high":1,"L1_at_max":1,"Llambda_at_max":1})");

    Checkpoint empty_high = cp;
    empty_high.hub_high.reset();
    empty_high.Mlambda = 0;
    CHECK(io::serialize_checkpoint(empty_high).find(R"("hub_high":null)") != std::string::npos);
    CHECK(io::parse_checkpoint(io::serialize_checkpoint(empty_high)) == empty_high);
}

TEST_CASE("checkpoint records round-trip along trajectories") {
    const ModelParams p(-0.3, 3, 1.7320508075688772, 0.4);
    TreeState s(p, 5);
    std::vector<Checkpoint> traj;
    run(s, 100000, {1.05, {}, {}}, [&](const Checkpoint& cp) { traj.push_back(cp); });
    std::stringstream ss;
    io::write_jsonl(ss, traj);
    CHECK(io::read_jsonl(ss) == traj);
}

TEST_CASE("format_real round-trips") {
    for (double x : {0.1, 1.9, 1.0 / 3.0, 1e-300, 123456789.125, 0.7639320225002102}) {
        CHECK(std::stod(io::format_real(x)) == x);
    }
    CHECK(io::format_real(1.9) == "1.9");
}

TEST_CASE("stats CSV schema") {
    EnsembleSpec spec{ModelParams(0.0, 2, 1.9, 0.5), 3, 1000, 1, {}, 1};
    const auto result = run_ensemble(spec);
    std::stringstream ss;
    io::write_stats_csv(ss, result.stats);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "n,stat_name,value");
    std::getline(ss, line);
    CHECK(line.rfind(std::to_string(result.stats[0].n) + ",M.mean,", 0) == 0);
    std::getline(ss, line);
    CHECK(line.find(",M.min,") != std::string::npos);
    int rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows + 2 == static_cast<int>(result.stats.size() * kQuantities.size() * 6));
}

TEST_CASE("config parsing and flag override") {
    auto cfg = io::parse_config(nlohmann::json::parse(
        R"({"beta": 0.5, "d": 3, "lambda": 2.0, "p_lambda": 0.3, "steps": 500, "formats": ["csv"]})"));
    CHECK(*cfg.beta == 0.5);
    CHECK(*cfg.formats == std::set{io::Format::Csv});
    io::RunConfig flags;
    flags.beta = 1.0;
    cfg.override_with(flags);
    CHECK(*cfg.beta == 1.0);
    CHECK(*cfg.d == 3);
    CHECK(cfg.model_params() == ModelParams(1.0, 3, 2.0, 0.3));

    CHECK_THROWS_AS(io::parse_formats("jsonl,xml"), ValidationError);
    CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(R"({"d": "three"})")), ValidationError);
    io::RunConfig missing;
    CHECK_THROWS_WITH_AS(missing.model_params(), doctest::Contains("--beta"), ValidationError);
}

TEST_CASE("cli solve-xstar") {
    auto r = invoke({"solve-xstar", "--beta", "0", "--d", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.763932022500\n");
    r = invoke({"solve-xstar", "--beta", "0", "--d", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "none: d <= 2+beta\n");
    r = invoke({"solve-xstar", "--beta", "-1.2", "--d", "2"});
    CHECK(r.code == 2);
    CHECK(r.err.find("beta must exceed -1") != std::string::npos);
}

TEST_CASE("cli argument errors exit with 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"run", "--beta", "zero"}).code == 2);
    CHECK(invoke({"run", "--beta", "0", "--d", "2", "--lambda", "0.5", "--p-lambda", "0.5"}).code == 2);
    CHECK(invoke({"run", "--beta", "0", "--d", "2"}).code == 2);
    CHECK(invoke({"ensemble", "--beta", "0", "--d", "2", "--lambda", "1.9", "--p-lambda", "0.5",
               "--steps", "100"})
              .code == 2);
    CHECK(invoke({"run", "--config", "/nonexistent/config.json"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("cli run is byte-identical across invocations") {
    const std::vector<std::string> args{"run", "--beta", "0", "--d", "2", "--lambda", "1.9",
                                        "--p-lambda", "0.5", "--steps", "1000", "--seed", "7"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind(R"({"n":2,)", 0) == 0);
    CHECK(a.out.find(R"({"n":1000,)") != std::string::npos);
}

TEST_CASE("cli config file with flag override") {
    const auto dir = scratch_dir("config");
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "cfg.json");
        os << R"({"beta": 0, "d": 2, "lambda": 1.9, "p_lambda": 0.5, "steps": 300, "seed": 7})";
    }
    const auto from_file = invoke({"run", "--config", (dir / "cfg.json").string(), "--steps", "1000"});
    const auto from_flags = invoke({"run", "--beta", "0", "--d", "2", "--lambda", "1.9", "--p-lambda",
                                 "0.5", "--steps", "1000", "--seed", "7"});
    REQUIRE(from_file.code == 0);
    CHECK(from_file.out == from_flags.out);
    fs::remove_all(dir);
}

TEST_CASE("cli analyze reproduces the ensemble report") {
    const auto dir = scratch_dir("analyze");
    const auto r = invoke({"ensemble", "--beta", "1", "--d", "2", "--lambda", "1.9", "--p-lambda", "0.5",
                        "--steps", "20000", "--replicas", "4", "--seed", "3", "--parallelism", "2",
                        "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "stats.csv"));
    CHECK(fs::exists(dir / "config.json"));
    CHECK(fs::exists(dir / "replicas" / "replica_0003.jsonl"));
    const auto a = invoke({"analyze", dir.string()});
    REQUIRE(a.code == 0);
    CHECK(a.out == slurp(dir / "report.json"));
    CHECK(a.out == r.out);

    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["regime"] == "sublinear");
    CHECK(j["replicas"].size() == 4);
    CHECK(invoke({"analyze", (dir / "missing").string()}).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("cli analyze needs trajectories") {
    const auto dir = scratch_dir("csv_only");
    const auto r = invoke({"ensemble", "--beta", "1", "--d", "2", "--lambda", "1.9", "--p-lambda", "0.5",
                        "--steps", "2000", "--replicas", "2", "--format", "csv", "--out",
                        dir.string()});
    REQUIRE(r.code == 0);
    CHECK_FALSE(fs::exists(dir / "replicas"));
    const auto a = invoke({"analyze", dir.string()});
    CHECK(a.code == 1);
    CHECK(a.err.find("jsonl") != std::string::npos);
    fs::remove_all(dir);
}
