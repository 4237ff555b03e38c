#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "marketsim/oracle.hpp"
#include "marketsim/prefgen.hpp"

using namespace marketsim;

namespace {

double freq_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("popularity sampling with one candidate is that candidate") {
    PopularityList weights{{4}, {0.0}};
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
        PreferenceList list = sample_popularity_list(weights, rng);
        REQUIRE(list.order.size() == 1);
        CHECK(list.order[0] == 4);
    }
}

TEST_CASE("two-candidate marginal is the weight share") {
    // weights (2, 1): the heavy candidate leads with probability 2/3
    PopularityList weights{{0, 1}, {std::log(2.0), 0.0}};
    Rng rng(2);
    const int draws = 100000;
    int heavy_first = 0;
    for (int i = 0; i < draws; ++i)
        if (sample_popularity_list(weights, rng).order[0] == 0) ++heavy_first;
    const double p = 2.0 / 3.0;
    CHECK(std::abs(heavy_first / static_cast<double>(draws) - p) <= 3.0 * freq_se(p, draws));
}

TEST_CASE("three-candidate full order follows the sequential-draw product") {
    PopularityList weights{{0, 1, 2}, {std::log(3.0), std::log(2.0), 0.0}};
    Rng rng(3);
    const int draws = 100000;
    int in_weight_order = 0;
    for (int i = 0; i < draws; ++i) {
        const PreferenceList list = sample_popularity_list(weights, rng);
        if (list.order == std::vector<std::int32_t>{0, 1, 2}) ++in_weight_order;
    }
    // (3/6) * (2/3) = 1/3
    const double p = 1.0 / 3.0;
    CHECK(std::abs(in_weight_order / static_cast<double>(draws) - p) <= 3.0 * freq_se(p, draws));
}

TEST_CASE("uniform builder covers all orders equally") {
    const int draws = 100000;
    std::map<std::vector<std::int32_t>, int> counts;
    for (int i = 0; i < draws; ++i) {
        BuiltInstance built = build_uniform(3, 3, true, trial_stream(10, static_cast<std::uint64_t>(i)));
        ++counts[built.instance.men[0].order];
    }
    REQUIRE(counts.size() == 6);
    double chi = 0.0;
    const double expected = draws / 6.0;
    for (const auto& [order, c] : counts) chi += (c - expected) * (c - expected) / expected;
    // 5 degrees of freedom, alpha = 0.001
    CHECK(chi < 20.515);
}

TEST_CASE("equal-weight popularity sampling is uniform too") {
    PopularityList weights = uniform_weights(3);
    Rng rng(4);
    const int draws = 100000;
    std::map<std::vector<std::int32_t>, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[sample_popularity_list(weights, rng).order];
    REQUIRE(counts.size() == 6);
    double chi = 0.0;
    const double expected = draws / 6.0;
    for (const auto& [order, c] : counts) chi += (c - expected) * (c - expected) / expected;
    CHECK(chi < 20.515);
}

TEST_CASE("one-by-one uniform market is the unique instance") {
    BuiltInstance built = build_uniform(1, 1, true, trial_stream(1, 0));
    CHECK(built.instance.men[0].order == std::vector<std::int32_t>{0});
    CHECK(built.instance.women[0].order == std::vector<std::int32_t>{0});
    CHECK_THROWS_AS(build_uniform(2, 2, false, trial_stream(1, 0)), std::invalid_argument);
}

TEST_CASE("master list ranks men identically for every woman") {
    BuiltInstance built = build_master_list(4, 4);
    for (const PreferenceList& her : built.instance.women)
        CHECK(her.order == std::vector<std::int32_t>{0, 1, 2, 3});
    for (std::int32_t m = 0; m < 4; ++m)
        CHECK(built.instance.men[static_cast<std::size_t>(m)].order ==
              std::vector<std::int32_t>({0, 1, 2, 3}));
    CHECK(inversion_odds(MasterListModel{}, 1) == 0.0);
    CHECK(inversion_odds(MasterListModel{}, 3) == 0.0);

    // every woman has exactly one stable partner on master lists
    StableSet set = enumerate_all_stable(build_master_list(5, 5, trial_stream(3, 0)).instance);
    CHECK(set.all.size() == 1);
}

TEST_CASE("geometric popularity stores exact log weights and its inversion odds") {
    PopularityModel model = geometric_popularity(200, 200, 0.99);
    REQUIRE(model.women.size() == 200);
    CHECK(model.women[0].log_weight[199] == doctest::Approx(199.0 * std::log(0.99)));
    CHECK(model.women[7].log_weight == model.women[0].log_weight);

    PopularityModel half = geometric_popularity(10, 10, 0.5);
    for (std::int32_t k = 1; k <= 4; ++k)
        CHECK(inversion_odds(half, k) == doctest::Approx(std::pow(2.0, -k)));
    CHECK_THROWS_AS(geometric_popularity(4, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(geometric_popularity(4, 4, 0.0), std::invalid_argument);
}

TEST_CASE("popularity spreads match a brute-force scan of all tuples") {
    PopularityModel model = geometric_popularity(4, 4, 0.5);
    model.men.assign(4, uniform_weights(4));
    const PopularitySpreads spreads = popularity_spreads(model, 4, 4);
    CHECK(spreads.r_men == doctest::Approx(1.0));
    CHECK(spreads.q_women == doctest::Approx(1.0));

    // make woman 2 disagree and recompute by hand
    model.women[2].log_weight = {0.0, std::log(4.0), 0.0, 0.0};
    double q = 0.0;
    for (std::size_t w0 = 0; w0 < 4; ++w0)
        for (std::size_t w1 = 0; w1 < 4; ++w1)
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = 0; b < 4; ++b) {
                    const double cross = model.women[w0].log_weight[a] -
                                         model.women[w0].log_weight[b] +
                                         model.women[w1].log_weight[b] -
                                         model.women[w1].log_weight[a];
                    q = std::max(q, std::exp(cross));
                }
    CHECK(popularity_spreads(model, 4, 4).q_women == doctest::Approx(q));
}

TEST_CASE("gaussian lists collapse to the identity when noise vanishes") {
    Rng rng(6);
    PreferenceList list = sample_gaussian_list(6, 1e-9, rng);
    CHECK(list.order == std::vector<std::int32_t>({0, 1, 2, 3, 4, 5}));
}

TEST_CASE("gaussian adjacent inversion frequency matches the normal difference") {
    Rng rng(7);
    const int draws = 100000;
    int inverted = 0;
    for (int i = 0; i < draws; ++i) {
        const PreferenceList list = sample_gaussian_list(2, 1.0, rng);
        if (list.order[0] == 1) ++inverted;
    }
    // score difference is Normal(1, 2): P[inversion] = Phi(-1/sqrt(2))
    const double p = 0.5 * std::erfc(1.0 / (std::sqrt(2.0) * std::sqrt(2.0)));
    const double hat = inverted / static_cast<double>(draws);
    CHECK(std::abs(hat - p) <= 3.0 * freq_se(p, draws));
    // the model's odds bound dominates the true odds
    CHECK(hat / (1.0 - hat) <= inversion_odds(GaussianModel{1.0}, 1));
}

TEST_CASE("gaussian inversion odds formula") {
    CHECK(inversion_odds(GaussianModel{1.0}, 2) == doctest::Approx(2.0 * std::exp(-1.0)));
    CHECK(inversion_odds(GaussianModel{2.0}, 4) == doctest::Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("swap model flips each adjacent pair half the time") {
    const int draws = 10000;
    int swaps = 0;
    for (int i = 0; i < draws; ++i) {
        BuiltInstance built = build_swap_pairs(2, trial_stream(11, static_cast<std::uint64_t>(i)));
        const auto& order = built.instance.men[0].order;
        REQUIRE(order.size() == 2);
        if (order == std::vector<std::int32_t>{1, 0}) ++swaps;
    }
    CHECK(std::abs(swaps / static_cast<double>(draws) - 0.5) <= 3.0 * freq_se(0.5, draws));
    CHECK_THROWS_AS(build_swap_pairs(3, trial_stream(11, 0)), std::invalid_argument);
}

TEST_CASE("swap model starts from the identity and only swaps within pairs") {
    BuiltInstance built = build_swap_pairs(6, trial_stream(12, 0));
    for (const PreferenceList& list : built.instance.men) {
        REQUIRE(list.order.size() == 6);
        for (std::size_t pair = 0; pair < 3; ++pair) {
            const std::int32_t a = list.order[2 * pair], b = list.order[2 * pair + 1];
            CHECK(std::min(a, b) == static_cast<std::int32_t>(2 * pair));
            CHECK(std::max(a, b) == static_cast<std::int32_t>(2 * pair + 1));
        }
    }
}

TEST_CASE("grouped model keeps acceptability inside two-by-two groups") {
    BuiltInstance built = build_grouped_incomplete(8, trial_stream(13, 0));
    for (std::int32_t m = 0; m < 8; ++m) {
        const auto& order = built.instance.men[static_cast<std::size_t>(m)].order;
        REQUIRE(order.size() == 2);
        for (std::int32_t w : order) CHECK(w / 2 == m / 2);
    }
    for (std::int32_t w = 0; w < 8; ++w) {
        const auto& order = built.instance.women[static_cast<std::size_t>(w)].order;
        REQUIRE(order.size() == 2);
        for (std::int32_t m : order) CHECK(m / 2 == w / 2);
    }
    CHECK_THROWS_AS(build_grouped_incomplete(5, trial_stream(13, 0)), std::invalid_argument);
}

TEST_CASE("cyclic construction lays out the shifted lists and weights") {
    BuiltInstance built = build_folklore_cyclic(5, 0.5);
    CHECK(built.instance.men[0].order == std::vector<std::int32_t>({1, 2, 3, 4, 0}));
    CHECK(built.instance.men[3].order == std::vector<std::int32_t>({4, 0, 1, 2, 3}));
    CHECK(built.instance.women[1].order == std::vector<std::int32_t>({1, 2, 3, 4, 0}));
    CHECK(built.instance.women[4].order == std::vector<std::int32_t>({4, 0, 1, 2, 3}));
    CHECK(built.instance.women[0].order.empty());  // carries weights instead

    const PopularityList& weights = built.popularity.women[0];
    REQUIRE(weights.support.size() == 5);
    for (std::int32_t i = 0; i < 5; ++i)
        CHECK(weights.log_weight[static_cast<std::size_t>(i)] ==
              doctest::Approx((i + 1) * std::log(0.5)));

    BuiltInstance sampled = build_folklore_cyclic(5, 0.5, trial_stream(14, 0));
    CHECK(sampled.instance.women[0].order.size() == 5);
    CHECK(validate_instance(sampled.instance).empty());
}

TEST_CASE("building twice from one stream is bit-identical") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        BuiltInstance a = build_uniform(6, 6, true, trial_stream(99, trial));
        BuiltInstance b = build_uniform(6, 6, true, trial_stream(99, trial));
        for (std::int32_t i = 0; i < 6; ++i) {
            CHECK(a.instance.men[static_cast<std::size_t>(i)].order ==
                  b.instance.men[static_cast<std::size_t>(i)].order);
            CHECK(a.instance.women[static_cast<std::size_t>(i)].order ==
                  b.instance.women[static_cast<std::size_t>(i)].order);
        }
    }
    BuiltInstance a = build_uniform(6, 6, true, trial_stream(99, 0));
    BuiltInstance b = build_uniform(6, 6, true, trial_stream(99, 1));
    CHECK(a.instance.men[0].order != b.instance.men[0].order);
}
