#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include "marketsim/io.hpp"

using namespace marketsim;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    try {
        return read_text_file(path);
    } catch (...) {
        return {};
    }
}

// drives the real binary; stdout and stderr captured separately
RunResult run(const std::string& args) {
    const std::string out_path = "/tmp/msim_cli_out.txt";
    const std::string err_path = "/tmp/msim_cli_err.txt";
    const std::string cmd =
        std::string(MSIM_BIN) + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

}  // namespace

TEST_CASE("help and usage errors use the documented exit codes") {
    CHECK(run("--help").code == 0);
    CHECK(run("gen --help").code == 0);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("").code == 2);                 // a subcommand is required
    CHECK(run("gen --n 4").code == 2);        // --model is required
    CHECK(run("solve").code == 2);            // file argument is required
}

TEST_CASE("deterministic generation writes byte-identical files") {
    const RunResult a = run("gen --model master --n 4 -o /tmp/msim_master_a.json");
    const RunResult b = run("gen --model master --n 4 -o /tmp/msim_master_b.json");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp("/tmp/msim_master_a.json") == slurp("/tmp/msim_master_b.json"));
    CHECK(a.out == b.out);  // the echoed descriptor too

    // a descriptor sidecar appears next to the instance
    const json sidecar = parse_json_file("/tmp/msim_master_a.model.json");
    CHECK(sidecar.at("model") == "master");
    CHECK(sidecar.at("M") == 4);
    CHECK_FALSE(sidecar.contains("seed"));

    CHECK(run("validate /tmp/msim_master_a.json").code == 0);
}

TEST_CASE("randomized models demand a seed and refuse bad parameters") {
    CHECK(run("gen --model uniform --n 4").code == 1);
    CHECK(run("gen --model uniform --n 4 --seed 5").code == 0);
    CHECK(run("gen --model popularity --n 4 --seed 5").code == 1);  // no weights, no lambda
    CHECK(run("gen --model popularity --n 4 --seed 5 --params lambda=0.5").code == 0);
    CHECK(run("gen --model popularity --n 4 --seed 5 --params lambda=oops").code == 1);
    CHECK(run("gen --model swap --n 5 --seed 5").code == 1);  // odd size
    CHECK(run("gen --model nonsense --n 4 --seed 5").code == 1);
    CHECK(run("gen --model popularity --seed 5 --params lambda=0.5").code == 1);  // no size
}

TEST_CASE("generated instances validate and solve end to end") {
    REQUIRE(run("gen --model folklore --n 5 --params lambda=0.5 --seed 7 "
                "-o /tmp/msim_folk.json")
                .code == 0);
    CHECK(run("validate /tmp/msim_folk.json").code == 0);

    const RunResult solved = run("solve /tmp/msim_folk.json --side men");
    REQUIRE(solved.code == 0);
    const json result = json::parse(solved.out);
    CHECK(result.at("format") == 1);
    // the cyclic market shifts every man up by one
    for (std::int32_t m = 0; m < 5; ++m)
        CHECK(result.at("matching").at("men")[static_cast<std::size_t>(m)] == (m + 1) % 5);
    for (const auto& rank : result.at("man_ranks")) CHECK(rank == 0);

    CHECK(run("solve /tmp/msim_folk.json --side both").code == 1);
    CHECK(run("solve /tmp/msim_missing.json").code == 1);
}

TEST_CASE("master lists solve identically from both sides") {
    REQUIRE(run("gen --model master --n 5 --seed 9 -o /tmp/msim_master_r.json").code == 0);
    const RunResult men = run("solve /tmp/msim_master_r.json --side men");
    const RunResult women = run("solve /tmp/msim_master_r.json --side women");
    REQUIRE(men.code == 0);
    REQUIRE(women.code == 0);
    CHECK(json::parse(men.out).at("matching") == json::parse(women.out).at("matching"));
}

TEST_CASE("fuzzed generation always validates") {
    int seed = 100;
    for (const std::string model : {"uniform", "gaussian", "swap", "grouped"}) {
        for (int n : {2, 6}) {
            const std::string file = "/tmp/msim_fuzz.json";
            const std::string cmd = "gen --model " + model + " --n " + std::to_string(n) +
                                    " --seed " + std::to_string(++seed) + " -o " + file;
            REQUIRE(run(cmd).code == 0);
            CHECK(run("validate " + file).code == 0);
        }
    }
}

TEST_CASE("enumerate lists stable husbands and handles the unmatched woman") {
    // two women, one man: one woman stays single in every stable matching
    write_text_file("/tmp/msim_tiny.json",
                    json{{"format", 1}, {"men", {{0}}}, {"women", {{0}, {0}}}}.dump());
    const RunResult matched = run("enumerate /tmp/msim_tiny.json --woman 0");
    REQUIRE(matched.code == 0);
    CHECK(json::parse(matched.out).at("husbands") == json({0}));

    const RunResult single = run("enumerate /tmp/msim_tiny.json --woman 1");
    REQUIRE(single.code == 0);
    CHECK(json::parse(single.out).at("husbands").empty());

    CHECK(run("enumerate /tmp/msim_tiny.json --woman 7").code == 1);

    // resampling from weights needs a seed
    write_text_file("/tmp/msim_w.json", json{{"weights", {1.0}}}.dump());
    CHECK(run("enumerate /tmp/msim_tiny.json --woman 0 --weights /tmp/msim_w.json").code == 1);
    CHECK(run("enumerate /tmp/msim_tiny.json --woman 0 --weights /tmp/msim_w.json --seed 3").code ==
          0);
}

TEST_CASE("oracle counts the cyclic market and respects its guard") {
    write_text_file("/tmp/msim_folk3.json",
                    json{{"format", 1},
                         {"men", {{1, 2, 0}, {2, 0, 1}, {0, 1, 2}}},
                         {"women", {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}}}
                        .dump());
    const RunResult oracle = run("oracle /tmp/msim_folk3.json");
    REQUIRE(oracle.code == 0);
    const json set = json::parse(oracle.out);
    CHECK(set.at("stable_pairs") == 9);
    CHECK(set.at("multiplicity_fraction") == 1.0);

    REQUIRE(run("gen --model uniform --n 8 --seed 2 -o /tmp/msim_big.json").code == 0);
    CHECK(run("oracle /tmp/msim_big.json").code == 1);
    CHECK(run("oracle /tmp/msim_big.json --guard 8").code == 0);
}

TEST_CASE("blocks reports separators for a singleton market") {
    REQUIRE(run("gen --model master --n 4 -o /tmp/msim_blocks.json").code == 0);
    const RunResult blocks = run("blocks /tmp/msim_blocks.json");
    REQUIRE(blocks.code == 0);
    const json report = json::parse(blocks.out);
    CHECK(report.at("separators") == json({0, 1, 2, 3, 4}));
    CHECK(report.at("relabel").size() == 4);
}

TEST_CASE("experiments run from flags, write reports, and repeat byte for byte") {
    CHECK(run("experiment --name jump-process --trials 200").code == 1);  // no seed
    CHECK(run("experiment --name bogus --seed 1").code == 1);

    const std::string flags = "experiment --name folklore-lb --n 15 --trials 50 --seed 21";
    REQUIRE(run(flags + " -o /tmp/msim_rep_a").code == 0);
    REQUIRE(run(flags + " --workers 4 -o /tmp/msim_rep_b").code == 0);
    CHECK(slurp("/tmp/msim_rep_a.csv") == slurp("/tmp/msim_rep_b.csv"));
    CHECK_FALSE(slurp("/tmp/msim_rep_a.csv").empty());

    const json summary = parse_json_file("/tmp/msim_rep_a.summary.json");
    CHECK(summary.at("config").at("seed") == 21);
    for (const auto& verdict : summary.at("verdicts")) CHECK(verdict.at("status") == "pass");
}

TEST_CASE("experiments load config files with flag overrides") {
    write_text_file("/tmp/msim_cfg.json",
                    json{{"format", 1},
                         {"name", "jump-process"},
                         {"trials", 300},
                         {"seed", 5},
                         {"params", {{"rho", 0.5}, {"a", 1.0}}}}
                        .dump());
    const RunResult base = run("experiment --config /tmp/msim_cfg.json");
    REQUIRE(base.code == 0);
    CHECK(json::parse(base.out).at("config").at("trials") == 300);

    const RunResult overridden = run("experiment --config /tmp/msim_cfg.json --trials 150");
    REQUIRE(overridden.code == 0);
    CHECK(json::parse(overridden.out).at("config").at("trials") == 150);
}

TEST_CASE("validate rejects malformed instances with a diagnostic") {
    write_text_file("/tmp/msim_bad.json", "{\"men\": [[0, 0]], \"women\": [[0]]}");
    const RunResult bad = run("validate /tmp/msim_bad.json");
    CHECK(bad.code == 1);
    CHECK_FALSE(bad.err.empty());
    CHECK(bad.out.empty());  // diagnostics stay off stdout

    write_text_file("/tmp/msim_garbage.json", "not json at all");
    CHECK(run("validate /tmp/msim_garbage.json").code == 1);
}
