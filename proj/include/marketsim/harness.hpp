#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "marketsim/io.hpp"

namespace marketsim {

struct ExperimentConfig {
    std::string name;
    std::string model;                     // variant selector where applicable
    std::map<std::string, double> params;  // lambda, sigma, a, rho, ...
    std::vector<std::int32_t> sweep;       // market sizes; empty = catalog default
    std::int64_t trials = 0;               // 0 = catalog default
    std::uint64_t seed = 0;
    std::int32_t oracle_guard = 7;
    std::int32_t workers = 1;
};

struct Aggregate {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation
    double se = 0.0;  // sd / sqrt(count)
    std::int64_t count = 0;
};

struct SweepPoint {
    std::int32_t n = 0;
    Aggregate primary;                      // the experiment's headline statistic
    std::map<std::string, double> extras;   // bounds and secondary statistics
};

struct Verdict {
    std::string rule;
    std::string status;  // "pass" | "fail" | "report-only"
    double bound = 0.0;
    double mean = 0.0;
    double se = 0.0;
};

// Rows are reproducible from (config, seed) alone: trial i draws from a
// stream keyed by (seed, i), so worker count and scheduling cannot change
// any byte of the output.
struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // one per trial
    std::vector<SweepPoint> points;
    std::map<std::string, double> scalars;
    std::vector<Verdict> verdicts;
};

std::vector<std::string> experiment_names();

// fills in catalog defaults for sweep/trials/params the caller left empty
ExperimentConfig with_defaults(ExperimentConfig cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// cross-sweep trend verdicts (decreasing statistic, constant floor); single
// points degrade to report-only
std::vector<Verdict> summarize(const std::string& name, const std::vector<SweepPoint>& points);

json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const json& j);

json report_summary_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);

// writes prefix.csv and prefix.summary.json
void write_report_files(const ExperimentReport& report, const std::string& prefix);

// shared instance builder keyed by model name:
// uniform | master | gaussian | popularity | swap | grouped | folklore
BuiltInstance build_model_instance(const std::string& model, std::int32_t n,
                                   const std::map<std::string, double>& params, Stream trial);

}  // namespace marketsim
