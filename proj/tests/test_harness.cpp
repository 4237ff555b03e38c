#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "marketsim/bounds.hpp"
#include "marketsim/harness.hpp"

using namespace marketsim;

namespace {

ExperimentConfig quick(const std::string& name, std::vector<std::int32_t> sweep,
                       std::int64_t trials, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.sweep = std::move(sweep);
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("catalog defaults fill empty fields and reject unknown names") {
    ExperimentConfig cfg;
    cfg.name = "oracle-sweep";
    const ExperimentConfig filled = with_defaults(cfg);
    CHECK(filled.model == "uniform");
    CHECK(filled.sweep == std::vector<std::int32_t>({2, 3, 4, 5, 6}));
    CHECK(filled.trials == 500);

    ExperimentConfig keep = quick("oracle-sweep", {3}, 7, 1);
    CHECK(with_defaults(keep).sweep == std::vector<std::int32_t>{3});
    CHECK(with_defaults(keep).trials == 7);

    ExperimentConfig bogus;
    bogus.name = "no-such-experiment";
    CHECK_THROWS_AS(with_defaults(bogus), std::invalid_argument);

    for (const std::string& name : experiment_names()) {
        ExperimentConfig probe;
        probe.name = name;
        CHECK_NOTHROW(with_defaults(probe));
    }
}

TEST_CASE("config json round-trips and accepts n as a one-point sweep") {
    ExperimentConfig cfg = quick("rank-gap", {40, 60}, 25, 9);
    cfg.model = "popularity";
    cfg.params["lambda"] = 0.25;
    cfg.workers = 3;
    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.name == cfg.name);
    CHECK(back.model == cfg.model);
    CHECK(back.sweep == cfg.sweep);
    CHECK(back.trials == cfg.trials);
    CHECK(back.seed == cfg.seed);
    CHECK(back.workers == cfg.workers);
    CHECK(back.params.at("lambda") == 0.25);

    const ExperimentConfig single =
        config_from_json(json{{"name", "rank-gap"}, {"n", 50}, {"trials", 3}, {"seed", 1}});
    CHECK(single.sweep == std::vector<std::int32_t>{50});
    CHECK_THROWS_AS(config_from_json(json{{"trials", 3}}), std::invalid_argument);
}

TEST_CASE("small oracle sweep passes every cross-check") {
    ExperimentConfig cfg = quick("oracle-sweep", {2, 3, 4}, 25, 42);
    cfg.workers = 2;
    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.rows.size() == 75);
    CHECK(report.columns ==
          std::vector<std::string>({"n", "trial", "stable_count", "oracle_disc", "block_disc"}));
    CHECK(report.scalars.at("oracle_disc_total") == 0.0);
    CHECK(report.scalars.at("block_disc_total") == 0.0);
    REQUIRE(report.verdicts.size() == 2);
    for (const Verdict& v : report.verdicts) CHECK(v.status == "pass");
    for (const SweepPoint& p : report.points) CHECK(p.extras.at("min_stable_count") >= 1.0);
}

TEST_CASE("master sweep finds a unique stable matching every time") {
    ExperimentConfig cfg = quick("oracle-sweep", {2, 4, 6}, 30, 7);
    cfg.model = "master";
    const ExperimentReport report = run_experiment(cfg);
    for (const SweepPoint& p : report.points) {
        CHECK(p.extras.at("max_stable_count") == 1.0);
        CHECK(p.extras.at("min_stable_count") == 1.0);
    }
}

TEST_CASE("worker count changes nothing in the written report") {
    ExperimentConfig cfg = quick("folklore-lb", {20}, 40, 11);
    cfg.workers = 1;
    const ExperimentReport serial = run_experiment(cfg);
    cfg.workers = 4;
    const ExperimentReport threaded = run_experiment(cfg);
    CHECK(report_csv(serial) == report_csv(threaded));
    // configs differ in the worker field only, so compare everything else
    CHECK(report_summary_json(serial).at("points") == report_summary_json(threaded).at("points"));
    CHECK(report_summary_json(serial).at("verdicts") ==
          report_summary_json(threaded).at("verdicts"));
}

TEST_CASE("cyclic lower-bound run tracks the exact expectation") {
    const ExperimentReport report = run_experiment(quick("folklore-lb", {30}, 400, 3));
    REQUIRE(report.points.size() == 1);
    const SweepPoint& p = report.points.front();
    CHECK(p.extras.at("exact_expectation") ==
          doctest::Approx(cyclic_expected_husbands(30, 0.99)));
    for (const Verdict& v : report.verdicts) CHECK(v.status == "pass");
}

TEST_CASE("jump process run is bounded and calibrated") {
    ExperimentConfig cfg = quick("jump-process", {}, 5000, 17);
    cfg.workers = 2;
    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.rows.size() == 5000);
    REQUIRE(report.verdicts.size() == 2);
    for (const Verdict& v : report.verdicts) CHECK(v.status == "pass");
    CHECK(report.scalars.at("p_zero_exact") == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("proposal inequality holds on every sampled instance") {
    const ExperimentReport report = run_experiment(quick("proposal-bound", {12}, 60, 23));
    CHECK(report.scalars.at("violation_total") == 0.0);
    REQUIRE(!report.verdicts.empty());
    CHECK(report.verdicts.front().status == "pass");
}

TEST_CASE("ratio bound run sees no violations at unit spreads") {
    const ExperimentReport report = run_experiment(quick("ratio-bound", {12}, 60, 29));
    for (const Verdict& v : report.verdicts)
        if (v.status != "report-only") CHECK(v.status == "pass");
    REQUIRE(!report.points.empty());
    CHECK(report.points.front().extras.at("log_ratio_bound") > 0.0);
}

TEST_CASE("stable pairs run stays under both bounds on a small market") {
    ExperimentConfig cfg = quick("stable-pairs", {12}, 60, 31);
    cfg.model = "symmetric";
    const ExperimentReport report = run_experiment(cfg);
    for (const Verdict& v : report.verdicts) CHECK(v.status == "pass");
    CHECK(report.points.front().extras.at("pairs_bound") ==
          doctest::Approx(stable_pairs_bound(12)));
}

TEST_CASE("block tail run reports a slope without judging it") {
    const ExperimentReport report = run_experiment(quick("block-tail", {40}, 30, 37));
    REQUIRE(!report.verdicts.empty());
    CHECK(report.verdicts.front().status == "report-only");
    CHECK(report.points.front().extras.count("tail_slope") == 1);
}

TEST_CASE("trend summaries judge decreasing means and floors") {
    auto point = [](double mean) {
        SweepPoint p;
        p.primary.mean = mean;
        p.primary.se = 0.01;
        return p;
    };
    CHECK(summarize("multiplicity", {point(0.9), point(0.5), point(0.3)})[0].status == "pass");
    CHECK(summarize("multiplicity", {point(0.5), point(0.5)})[0].status == "fail");
    CHECK(summarize("multiplicity", {point(0.5)})[0].status == "report-only");
    CHECK(summarize("counterexample-swap", {point(0.3)})[0].status == "pass");
    CHECK(summarize("counterexample-grouped", {point(0.04)})[0].status == "fail");
    CHECK(summarize("rank-gap", {point(1.0)}).empty());
}

TEST_CASE("model dispatcher covers the catalog and rejects strangers") {
    const Stream stream = trial_stream(41, 0);
    for (const std::string& model :
         {"uniform", "master", "gaussian", "popularity", "swap", "grouped", "folklore"}) {
        const BuiltInstance built = build_model_instance(model, 6, {}, stream);
        CHECK(built.instance.num_men() == 6);
        CHECK(validate_instance(built.instance).empty());
    }
    // the folklore build materializes the weighted woman's list
    CHECK_FALSE(build_model_instance("folklore", 6, {}, stream).instance.women[0].order.empty());
    CHECK_THROWS_AS(build_model_instance("boring", 6, {}, stream), std::invalid_argument);
}

TEST_CASE("report files land on disk with the documented shapes") {
    const ExperimentReport report = run_experiment(quick("folklore-lb", {10}, 20, 43));
    const std::string prefix = "/tmp/marketsim_harness_test";
    write_report_files(report, prefix);
    const std::string csv = read_text_file(prefix + ".csv");
    CHECK(csv.rfind("n,trial,husbands,proposals\n", 0) == 0);
    const json summary = parse_json_file(prefix + ".summary.json");
    CHECK(summary.at("format") == 1);
    CHECK(summary.at("config").at("name") == "folklore-lb");
    CHECK(summary.at("points").size() == 1);
    std::remove((prefix + ".csv").c_str());
    std::remove((prefix + ".summary.json").c_str());

    // byte-identical on a rerun
    CHECK(report_csv(run_experiment(quick("folklore-lb", {10}, 20, 43))) == report_csv(report));
}
