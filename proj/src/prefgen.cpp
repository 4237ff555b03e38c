#include "marketsim/prefgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace marketsim {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void require_sizes(std::int32_t num_men, std::int32_t num_women) {
    require(num_men > 0 && num_women > 0, "market sides must be positive");
}

Rng person_rng(Stream trial, Side side, std::int32_t index) {
    return person_stream(trial, static_cast<int>(side), index).rng();
}

PreferenceList uniform_permutation(std::int32_t count, Rng& rng) {
    PreferenceList list;
    list.order.resize(static_cast<std::size_t>(count));
    std::iota(list.order.begin(), list.order.end(), 0);
    rng.shuffle(list.order);
    return list;
}

PreferenceList identity_list(std::int32_t count) {
    PreferenceList list;
    list.order.resize(static_cast<std::size_t>(count));
    std::iota(list.order.begin(), list.order.end(), 0);
    return list;
}

ModelDescriptor describe(std::string model, std::int32_t num_men, std::int32_t num_women,
                         std::map<std::string, double> params = {}) {
    ModelDescriptor d;
    d.model = std::move(model);
    d.num_men = num_men;
    d.num_women = num_women;
    d.params = std::move(params);
    return d;
}

}  // namespace

bool PopularityModel::has_women_side() const {
    for (const auto& list : women)
        if (!list.empty()) return true;
    return false;
}

bool PopularityModel::has_men_side() const {
    for (const auto& list : men)
        if (!list.empty()) return true;
    return false;
}

PreferenceList sample_popularity_list(const PopularityList& weights, Rng& rng) {
    require(!weights.empty(), "cannot sample from empty weights");
    require(weights.support.size() == weights.log_weight.size(),
            "weights support and log_weight lengths differ");
    const std::size_t count = weights.support.size();
    std::vector<double> key(count);
    for (std::size_t i = 0; i < count; ++i) key[i] = weights.log_weight[i] + rng.gumbel();
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] > key[b];
        return weights.support[a] < weights.support[b];
    });
    PreferenceList list;
    list.order.reserve(count);
    for (std::size_t i : idx) list.order.push_back(weights.support[i]);
    return list;
}

PreferenceList sample_gaussian_list(std::int32_t num_men, double sigma, Rng& rng) {
    require(num_men > 0, "need at least one man");
    require(sigma > 0.0, "sigma must be positive");
    std::vector<double> score(static_cast<std::size_t>(num_men));
    for (std::int32_t i = 0; i < num_men; ++i)
        score[static_cast<std::size_t>(i)] = static_cast<double>(i) + rng.normal(sigma);
    PreferenceList list;
    list.order.resize(static_cast<std::size_t>(num_men));
    std::iota(list.order.begin(), list.order.end(), 0);
    std::sort(list.order.begin(), list.order.end(), [&](std::int32_t a, std::int32_t b) {
        double sa = score[static_cast<std::size_t>(a)];
        double sb = score[static_cast<std::size_t>(b)];
        if (sa != sb) return sa < sb;
        return a < b;
    });
    return list;
}

BuiltInstance build_uniform(std::int32_t num_men, std::int32_t num_women, bool complete,
                            Stream trial) {
    require_sizes(num_men, num_women);
    require(complete, "uniform model only defines complete lists");
    BuiltInstance built;
    built.instance.men.reserve(static_cast<std::size_t>(num_men));
    built.instance.women.reserve(static_cast<std::size_t>(num_women));
    for (std::int32_t m = 0; m < num_men; ++m) {
        Rng rng = person_rng(trial, Side::Men, m);
        built.instance.men.push_back(uniform_permutation(num_women, rng));
    }
    for (std::int32_t w = 0; w < num_women; ++w) {
        Rng rng = person_rng(trial, Side::Women, w);
        built.instance.women.push_back(uniform_permutation(num_men, rng));
    }
    built.descriptor = describe("uniform", num_men, num_women);
    return built;
}

BuiltInstance build_master_list(std::int32_t num_men, std::int32_t num_women) {
    require_sizes(num_men, num_women);
    BuiltInstance built;
    for (std::int32_t m = 0; m < num_men; ++m)
        built.instance.men.push_back(identity_list(num_women));
    for (std::int32_t w = 0; w < num_women; ++w)
        built.instance.women.push_back(identity_list(num_men));
    built.descriptor = describe("master", num_men, num_women);
    return built;
}

BuiltInstance build_master_list(std::int32_t num_men, std::int32_t num_women, Stream trial) {
    BuiltInstance built = build_master_list(num_men, num_women);
    for (std::int32_t m = 0; m < num_men; ++m) {
        Rng rng = person_rng(trial, Side::Men, m);
        built.instance.men[static_cast<std::size_t>(m)] = uniform_permutation(num_women, rng);
    }
    return built;
}

PopularityModel geometric_popularity(std::int32_t num_men, std::int32_t num_women,
                                     double lambda) {
    require_sizes(num_men, num_women);
    require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    const double log_lambda = std::log(lambda);
    PopularityList weights;
    weights.support.resize(static_cast<std::size_t>(num_men));
    std::iota(weights.support.begin(), weights.support.end(), 0);
    weights.log_weight.resize(static_cast<std::size_t>(num_men));
    for (std::int32_t i = 0; i < num_men; ++i)
        weights.log_weight[static_cast<std::size_t>(i)] = static_cast<double>(i) * log_lambda;
    PopularityModel model;
    model.women.assign(static_cast<std::size_t>(num_women), weights);
    return model;
}

PopularityList uniform_weights(std::int32_t count) {
    PopularityList weights;
    weights.support.resize(static_cast<std::size_t>(count));
    std::iota(weights.support.begin(), weights.support.end(), 0);
    weights.log_weight.assign(static_cast<std::size_t>(count), 0.0);
    return weights;
}

BuiltInstance build_popularity(const PopularityModel& model, std::int32_t num_men,
                               std::int32_t num_women, Stream trial) {
    require_sizes(num_men, num_women);
    require(model.women.empty() || model.women.size() == static_cast<std::size_t>(num_women),
            "women weight rows must match the number of women");
    require(model.men.empty() || model.men.size() == static_cast<std::size_t>(num_men),
            "men weight rows must match the number of men");
    BuiltInstance built;
    for (std::int32_t m = 0; m < num_men; ++m) {
        Rng rng = person_rng(trial, Side::Men, m);
        const PopularityList* weights =
            model.men.empty() ? nullptr : &model.men[static_cast<std::size_t>(m)];
        built.instance.men.push_back(weights != nullptr && !weights->empty()
                                         ? sample_popularity_list(*weights, rng)
                                         : uniform_permutation(num_women, rng));
    }
    for (std::int32_t w = 0; w < num_women; ++w) {
        Rng rng = person_rng(trial, Side::Women, w);
        const PopularityList* weights =
            model.women.empty() ? nullptr : &model.women[static_cast<std::size_t>(w)];
        built.instance.women.push_back(weights != nullptr && !weights->empty()
                                           ? sample_popularity_list(*weights, rng)
                                           : uniform_permutation(num_men, rng));
    }
    built.descriptor = describe("popularity", num_men, num_women);
    built.popularity = model;
    return built;
}

BuiltInstance build_gaussian(std::int32_t num_men, std::int32_t num_women, double sigma,
                             Stream trial) {
    require_sizes(num_men, num_women);
    require(sigma > 0.0, "sigma must be positive");
    BuiltInstance built;
    for (std::int32_t m = 0; m < num_men; ++m) {
        Rng rng = person_rng(trial, Side::Men, m);
        built.instance.men.push_back(uniform_permutation(num_women, rng));
    }
    for (std::int32_t w = 0; w < num_women; ++w) {
        Rng rng = person_rng(trial, Side::Women, w);
        built.instance.women.push_back(sample_gaussian_list(num_men, sigma, rng));
    }
    built.descriptor = describe("gaussian", num_men, num_women, {{"sigma", sigma}});
    return built;
}

BuiltInstance build_swap_pairs(std::int32_t n, Stream trial) {
    require(n > 0 && n % 2 == 0, "swap model needs a positive even n");
    BuiltInstance built;
    auto sample_side = [&](Side side) {
        std::vector<PreferenceList> lists;
        lists.reserve(static_cast<std::size_t>(n));
        for (std::int32_t p = 0; p < n; ++p) {
            Rng rng = person_rng(trial, side, p);
            PreferenceList list = identity_list(n);
            for (std::int32_t pair = 0; pair < n / 2; ++pair)
                if (rng.below(2) == 1)
                    std::swap(list.order[static_cast<std::size_t>(2 * pair)],
                              list.order[static_cast<std::size_t>(2 * pair + 1)]);
            lists.push_back(std::move(list));
        }
        return lists;
    };
    built.instance.men = sample_side(Side::Men);
    built.instance.women = sample_side(Side::Women);
    built.descriptor = describe("swap", n, n);
    return built;
}

BuiltInstance build_grouped_incomplete(std::int32_t n, Stream trial) {
    require(n > 0 && n % 2 == 0, "grouped model needs a positive even n");
    BuiltInstance built;
    auto sample_side = [&](Side side) {
        std::vector<PreferenceList> lists;
        lists.reserve(static_cast<std::size_t>(n));
        for (std::int32_t p = 0; p < n; ++p) {
            Rng rng = person_rng(trial, side, p);
            std::int32_t base = (p / 2) * 2;
            PreferenceList list;
            list.order = {base, base + 1};
            if (rng.below(2) == 1) std::swap(list.order[0], list.order[1]);
            lists.push_back(std::move(list));
        }
        return lists;
    };
    built.instance.men = sample_side(Side::Men);
    built.instance.women = sample_side(Side::Women);
    built.descriptor = describe("grouped", n, n);
    return built;
}

BuiltInstance build_folklore_cyclic(std::int32_t n, double lambda) {
    require(n >= 2, "cyclic model needs at least two on each side");
    require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    BuiltInstance built;
    for (std::int32_t m = 0; m < n; ++m) {
        PreferenceList list;
        list.order.reserve(static_cast<std::size_t>(n));
        for (std::int32_t step = 1; step <= n; ++step) list.order.push_back((m + step) % n);
        built.instance.men.push_back(std::move(list));
    }
    built.instance.women.emplace_back();  // weights below, list left empty
    for (std::int32_t w = 1; w < n; ++w) {
        PreferenceList list;
        list.order.reserve(static_cast<std::size_t>(n));
        for (std::int32_t step = 0; step < n; ++step) list.order.push_back((w + step) % n);
        built.instance.women.push_back(std::move(list));
    }
    const double log_lambda = std::log(lambda);
    PopularityList weights;
    weights.support.resize(static_cast<std::size_t>(n));
    std::iota(weights.support.begin(), weights.support.end(), 0);
    weights.log_weight.resize(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i)
        weights.log_weight[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) * log_lambda;
    built.popularity.women.assign(static_cast<std::size_t>(n), PopularityList{});
    built.popularity.women[0] = std::move(weights);
    built.descriptor = describe("folklore", n, n, {{"lambda", lambda}});
    return built;
}

BuiltInstance build_folklore_cyclic(std::int32_t n, double lambda, Stream trial) {
    BuiltInstance built = build_folklore_cyclic(n, lambda);
    Rng rng = person_rng(trial, Side::Women, 0);
    built.instance.women[0] = sample_popularity_list(built.popularity.women[0], rng);
    return built;
}

double inversion_odds(const PopularityModel& model, std::int32_t k) {
    require(k >= 1, "offset must be at least 1");
    require(model.has_women_side(), "model has no women-side weights");
    double best_log = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& list : model.women) {
        if (list.empty()) continue;
        // support is ascending by man index; scan pairs k apart by index value
        for (std::size_t a = 0; a < list.support.size(); ++a) {
            std::int32_t target = list.support[a] + k;
            auto it = std::lower_bound(list.support.begin() + static_cast<std::ptrdiff_t>(a),
                                       list.support.end(), target);
            if (it == list.support.end() || *it != target) continue;
            std::size_t b = static_cast<std::size_t>(it - list.support.begin());
            best_log = std::max(best_log, list.log_weight[b] - list.log_weight[a]);
            found = true;
        }
    }
    return found ? std::exp(best_log) : 0.0;
}

double inversion_odds(const GaussianModel& model, std::int32_t k) {
    require(k >= 1, "offset must be at least 1");
    require(model.sigma > 0.0, "sigma must be positive");
    const double z = static_cast<double>(k) / (2.0 * model.sigma);
    return 2.0 * std::exp(-z * z);
}

double inversion_odds(MasterListModel, std::int32_t k) {
    require(k >= 1, "offset must be at least 1");
    return 0.0;
}

PopularitySpreads popularity_spreads(const PopularityModel& model, std::int32_t num_men,
                                     std::int32_t num_women) {
    require_sizes(num_men, num_women);
    require(model.women.size() == static_cast<std::size_t>(num_women),
            "spreads need weights for every woman");
    require(model.men.size() == static_cast<std::size_t>(num_men),
            "spreads need weights for every man");
    for (const auto& list : model.women)
        require(list.support.size() == static_cast<std::size_t>(num_men),
                "spreads need complete women-side weights");
    for (const auto& list : model.men)
        require(list.support.size() == static_cast<std::size_t>(num_women),
                "spreads need complete men-side weights");

    double log_r = 0.0;
    for (const auto& list : model.men) {
        auto [lo, hi] = std::minmax_element(list.log_weight.begin(), list.log_weight.end());
        log_r = std::max(log_r, *hi - *lo);
    }

    // q = max over man pairs (a, b) of max_w D_w(a)/D_w(b) * max_w' D_w'(b)/D_w'(a)
    double log_q = 0.0;
    for (std::int32_t a = 0; a < num_men; ++a) {
        for (std::int32_t b = 0; b < num_men; ++b) {
            if (a == b) continue;
            double forward = -std::numeric_limits<double>::infinity();
            double backward = forward;
            for (const auto& list : model.women) {
                double la = list.log_weight[static_cast<std::size_t>(a)];
                double lb = list.log_weight[static_cast<std::size_t>(b)];
                forward = std::max(forward, la - lb);
                backward = std::max(backward, lb - la);
            }
            log_q = std::max(log_q, forward + backward);
        }
    }
    return PopularitySpreads{std::exp(log_r), std::exp(log_q)};
}

}  // namespace marketsim
