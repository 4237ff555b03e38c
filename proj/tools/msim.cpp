#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marketsim/harness.hpp"

namespace {

using namespace marketsim;

void fail(const std::string& message) { throw std::invalid_argument(message); }

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> params;
    for (const std::string& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) fail("params must look like key=value: " + item);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1), &used);
        } catch (const std::exception&) {
            fail("params value is not a number: " + item);
        }
        if (used != item.size() - eq - 1) fail("params value is not a number: " + item);
        params[item.substr(0, eq)] = value;
    }
    return params;
}

std::string sidecar_path(const std::string& out) {
    const std::string suffix = ".json";
    if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + ".model.json";
    return out + ".model.json";
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

struct GenArgs {
    std::string model;
    std::int32_t n = 0, m = 0, w = 0;
    std::uint64_t seed = 0;
    bool seeded = false;
    std::vector<std::string> params;
    std::string weights_file;
    std::string out;
};

int cmd_gen(const GenArgs& args) {
    const std::int32_t num_men = args.m > 0 ? args.m : args.n;
    const std::int32_t num_women = args.w > 0 ? args.w : args.n;
    if (num_men <= 0 || num_women <= 0) fail("gen needs --n or both --m and --w");
    std::map<std::string, double> params = parse_params(args.params);

    const bool deterministic = args.model == "master" || args.model == "folklore";
    if (!deterministic && !args.seeded)
        fail("model " + args.model + " is randomized and needs an explicit --seed");
    const Stream trial = trial_stream(args.seed, 0);

    BuiltInstance built;
    if (args.model == "popularity") {
        if (num_men != num_women) fail("popularity model is square; use --n");
        PopularityModel model;
        if (!args.weights_file.empty())
            model = weight_model_from_json(parse_json_file(args.weights_file));
        else if (params.count("lambda"))
            model = geometric_popularity(num_men, num_women, params.at("lambda"));
        else
            fail("popularity model needs --weights FILE or --params lambda=VALUE");
        built = build_popularity(model, num_men, num_women, trial);
    } else if (args.model == "master") {
        built = args.seeded ? build_master_list(num_men, num_women, trial)
                            : build_master_list(num_men, num_women);
    } else if (args.model == "folklore") {
        if (num_men != num_women) fail("folklore model is square; use --n");
        const double lambda = params.count("lambda") ? params.at("lambda") : 0.5;
        built = args.seeded ? build_folklore_cyclic(num_men, lambda, trial)
                            : build_folklore_cyclic(num_men, lambda);
    } else if (args.model == "swap" || args.model == "grouped") {
        if (num_men != num_women) fail(args.model + " model is square; use --n");
        built = args.model == "swap" ? build_swap_pairs(num_men, trial)
                                     : build_grouped_incomplete(num_men, trial);
    } else {
        built = build_model_instance(args.model, num_men, params, trial);
        if (args.model == "uniform" && num_men != num_women)
            built = build_uniform(num_men, num_women, true, trial);
        if (args.model == "gaussian" && num_men != num_women)
            built = build_gaussian(num_men, num_women,
                                   params.count("sigma") ? params.at("sigma") : 1.0, trial);
    }
    built.descriptor.seeded = args.seeded;
    built.descriptor.seed = args.seed;
    for (const auto& [k, v] : params) built.descriptor.params.emplace(k, v);

    if (!args.out.empty()) {
        write_text_file(args.out, instance_to_json(built.instance).dump(2) + "\n");
        write_text_file(sidecar_path(args.out),
                        descriptor_to_json(built.descriptor).dump(2) + "\n");
        print_json(descriptor_to_json(built.descriptor));
    } else {
        print_json(instance_to_json(built.instance));
    }
    return 0;
}

int cmd_solve(const std::string& file, const std::string& side) {
    const Instance inst = instance_from_json(parse_json_file(file));
    if (side != "men" && side != "women") fail("--side must be men or women");
    DeferredAcceptanceResult result;
    if (side == "men")
        result = mpda(inst);
    else
        result.matching = wpda(inst);
    json man_ranks = json::array(), woman_ranks = json::array();
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        const std::int32_t w = result.matching.of_man(m);
        man_ranks.push_back(w == kUnmatched
                                ? -1
                                : inst.men[static_cast<std::size_t>(m)].rank_of(w));
    }
    for (std::int32_t w = 0; w < inst.num_women(); ++w) {
        const std::int32_t m = result.matching.of_woman(w);
        woman_ranks.push_back(m == kUnmatched
                                  ? -1
                                  : inst.women[static_cast<std::size_t>(w)].rank_of(m));
    }
    print_json(json{{"format", 1},
                    {"side", side},
                    {"matching", matching_to_json(result.matching)},
                    {"man_ranks", man_ranks},
                    {"woman_ranks", woman_ranks},
                    {"proposals", result.trace.size()}});
    return 0;
}

int cmd_enumerate(const std::string& file, std::int32_t woman, const std::string& weights_file,
                  std::uint64_t seed, bool seeded) {
    const Instance inst = instance_from_json(parse_json_file(file));
    if (woman < 0 || woman >= inst.num_women()) fail("no such woman: " + std::to_string(woman));
    HusbandEnumeration e;
    if (!weights_file.empty()) {
        if (!seeded) fail("--weights resamples her list and needs an explicit --seed");
        const PopularityList weights = weights_from_json(parse_json_file(weights_file));
        Rng rng = person_stream(trial_stream(seed, 0), 1, woman).rng();
        e = enumerate_stable_husbands(inst, woman, weights, rng);
    } else {
        e = enumerate_stable_husbands(inst, woman);
    }
    print_json(husbands_to_json(e));
    return 0;
}

int cmd_blocks(const std::string& file) {
    const Instance inst = instance_from_json(parse_json_file(file));
    const BlockContext ctx = make_block_context(inst);
    print_json(blocks_to_json(ctx.decomposition));
    return 0;
}

int cmd_oracle(const std::string& file, std::int32_t guard) {
    const Instance inst = instance_from_json(parse_json_file(file));
    print_json(stable_set_to_json(enumerate_all_stable(inst, guard)));
    return 0;
}

struct ExperimentArgs {
    std::string name;
    std::string config_file;
    std::string model;
    std::int32_t n = 0;
    std::vector<std::int32_t> sweep;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    bool seeded = false;
    std::int32_t guard = 0;
    std::int32_t workers = 0;
    std::vector<std::string> params;
    std::string out;
};

int cmd_experiment(const ExperimentArgs& args) {
    ExperimentConfig cfg;
    bool config_has_seed = false;
    if (!args.config_file.empty()) {
        const json j = parse_json_file(args.config_file);
        cfg = config_from_json(j);
        config_has_seed = j.is_object() && j.contains("seed");
    }
    if (!args.name.empty()) cfg.name = args.name;
    if (!args.model.empty()) cfg.model = args.model;
    if (!args.sweep.empty()) cfg.sweep = args.sweep;
    if (args.n > 0) cfg.sweep = {args.n};
    if (args.trials > 0) cfg.trials = args.trials;
    if (args.seeded) cfg.seed = args.seed;
    if (args.guard > 0) cfg.oracle_guard = args.guard;
    if (args.workers > 0) cfg.workers = args.workers;
    for (const auto& [k, v] : parse_params(args.params)) cfg.params[k] = v;
    if (cfg.name.empty()) fail("experiment needs --name or a config file with one");
    if (!args.seeded && !config_has_seed)
        fail("experiments are randomized and need an explicit --seed");

    const ExperimentReport report = run_experiment(cfg);
    if (!args.out.empty()) write_report_files(report, args.out);
    print_json(report_summary_json(report));
    for (const Verdict& v : report.verdicts)
        if (v.status == "fail") return 1;
    return 0;
}

int cmd_validate(const std::string& file) {
    const Instance inst = instance_from_json(parse_json_file(file));
    print_json(json{{"format", 1},
                    {"ok", true},
                    {"men", inst.num_men()},
                    {"women", inst.num_women()}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-sided matching market simulator"};
    app.require_subcommand(1);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "sample an instance from a preference model");
    gen->add_option("--model", gen_args.model,
                    "uniform | master | gaussian | popularity | swap | grouped | folklore")
        ->required();
    gen->add_option("--n", gen_args.n, "men and women count");
    gen->add_option("--m", gen_args.m, "men count");
    gen->add_option("--w", gen_args.w, "women count");
    auto* gen_seed = gen->add_option("--seed", gen_args.seed, "rng seed");
    gen->add_option("--params", gen_args.params, "model parameters, key=value");
    gen->add_option("--weights", gen_args.weights_file, "popularity weight file (JSON)");
    gen->add_option("-o,--output", gen_args.out, "instance file; a .model.json sidecar is added");

    std::string solve_file, solve_side = "men";
    CLI::App* solve = app.add_subcommand("solve", "run deferred acceptance on an instance file");
    solve->add_option("file", solve_file)->required();
    solve->add_option("--side", solve_side, "men | women (default men)");

    std::string enum_file, enum_weights;
    std::int32_t enum_woman = 0;
    std::uint64_t enum_seed = 0;
    CLI::App* enumerate = app.add_subcommand("enumerate", "list one woman's stable husbands");
    enumerate->add_option("file", enum_file)->required();
    enumerate->add_option("--woman", enum_woman)->required();
    enumerate->add_option("--weights", enum_weights, "resample her list from these weights");
    auto* enum_seed_opt = enumerate->add_option("--seed", enum_seed, "rng seed for --weights");

    std::string blocks_file;
    CLI::App* blocks = app.add_subcommand("blocks", "block decomposition of an instance file");
    blocks->add_option("file", blocks_file)->required();

    std::string oracle_file;
    std::int32_t oracle_guard = 7;
    CLI::App* oracle = app.add_subcommand("oracle", "enumerate every stable matching (small n)");
    oracle->add_option("file", oracle_file)->required();
    oracle->add_option("--guard", oracle_guard, "refuse instances with more people than this");

    ExperimentArgs exp_args;
    CLI::App* experiment = app.add_subcommand("experiment", "run a catalog experiment");
    experiment->add_option("--name", exp_args.name, "experiment name");
    experiment->add_option("--config", exp_args.config_file, "config JSON file");
    experiment->add_option("--model", exp_args.model, "model variant where applicable");
    experiment->add_option("--n", exp_args.n, "single sweep point");
    experiment->add_option("--sweep", exp_args.sweep, "sweep points");
    experiment->add_option("--trials", exp_args.trials, "trials per sweep point");
    auto* exp_seed = experiment->add_option("--seed", exp_args.seed, "rng seed");
    experiment->add_option("--guard", exp_args.guard, "oracle size guard");
    experiment->add_option("--workers", exp_args.workers, "worker threads");
    experiment->add_option("--params", exp_args.params, "model parameters, key=value");
    experiment->add_option("-o,--output", exp_args.out, "report prefix: PREFIX.csv + PREFIX.summary.json");

    std::string validate_file;
    CLI::App* validate = app.add_subcommand("validate", "check an instance file");
    validate->add_option("file", validate_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    gen_args.seeded = gen_seed->count() > 0;
    exp_args.seeded = exp_seed->count() > 0;

    try {
        if (gen->parsed()) return cmd_gen(gen_args);
        if (solve->parsed()) return cmd_solve(solve_file, solve_side);
        if (enumerate->parsed())
            return cmd_enumerate(enum_file, enum_woman, enum_weights, enum_seed,
                                 enum_seed_opt->count() > 0);
        if (blocks->parsed()) return cmd_blocks(blocks_file);
        if (oracle->parsed()) return cmd_oracle(oracle_file, oracle_guard);
        if (experiment->parsed()) return cmd_experiment(exp_args);
        if (validate->parsed()) return cmd_validate(validate_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
