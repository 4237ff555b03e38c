#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "marketsim/oracle.hpp"
#include "marketsim/rng.hpp"

using namespace marketsim;

namespace {

// every assignment of men to distinct women or single, filtered by is_stable;
// no pruning at all, so it cannot share a bug with the oracle's recursion
std::set<std::vector<std::int32_t>> naive_stable(const Instance& inst) {
    std::set<std::vector<std::int32_t>> found;
    std::vector<std::int32_t> partner(inst.men.size(), kUnmatched);
    std::vector<bool> taken(inst.women.size(), false);
    auto rec = [&](auto&& self, std::int32_t m) -> void {
        if (m == inst.num_men()) {
            Matching mu = Matching::from_man_partners(partner, inst.num_women());
            if (is_stable(inst, mu)) found.insert(partner);
            return;
        }
        self(self, m + 1);  // single
        for (std::int32_t w = 0; w < inst.num_women(); ++w) {
            if (taken[static_cast<std::size_t>(w)]) continue;
            taken[static_cast<std::size_t>(w)] = true;
            partner[static_cast<std::size_t>(m)] = w;
            self(self, m + 1);
            partner[static_cast<std::size_t>(m)] = kUnmatched;
            taken[static_cast<std::size_t>(w)] = false;
        }
    };
    rec(rec, 0);
    return found;
}

Instance random_instance(Rng& rng, std::int32_t n, bool truncate) {
    Instance inst;
    auto random_list = [&](std::int32_t count) {
        std::vector<std::int32_t> order(static_cast<std::size_t>(count));
        for (std::int32_t i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order);
        if (truncate) order.resize(rng.below(static_cast<std::uint64_t>(count) + 1));
        return PreferenceList{order};
    };
    for (std::int32_t i = 0; i < n; ++i) inst.men.push_back(random_list(n));
    for (std::int32_t i = 0; i < n; ++i) inst.women.push_back(random_list(n));
    return inst;
}

Instance folklore3() {
    // cyclic lists; all nine pairs are stable
    Instance inst;
    inst.men = {PreferenceList{{1, 2, 0}}, PreferenceList{{2, 0, 1}}, PreferenceList{{0, 1, 2}}};
    inst.women = {PreferenceList{{0, 1, 2}}, PreferenceList{{1, 2, 0}}, PreferenceList{{2, 0, 1}}};
    return inst;
}

}  // namespace

TEST_CASE("one mutually acceptable pair has exactly one stable matching") {
    Instance inst;
    inst.men = {PreferenceList{{0}}};
    inst.women = {PreferenceList{{0}}};
    StableSet set = enumerate_all_stable(inst);
    REQUIRE(set.all.size() == 1);
    CHECK(set.all[0].of_man(0) == 0);
    CHECK(count_stable_pairs(set) == 1);
    CHECK(multiplicity_fraction(set) == 0.0);
}

TEST_CASE("cyclic three-by-three market makes every pair stable") {
    StableSet set = enumerate_all_stable(folklore3());
    CHECK(set.all.size() == 3);  // the three rotations
    CHECK(count_stable_pairs(set) == 9);
    CHECK(multiplicity_fraction(set) == 1.0);
    for (const auto& partners : set.man_partners) CHECK(partners.size() == 3);
    for (const auto& partners : set.woman_partners) CHECK(partners.size() == 3);
}

TEST_CASE("identical women lists force a unique stable matching") {
    Instance inst;
    const std::int32_t n = 4;
    for (std::int32_t i = 0; i < n; ++i) {
        inst.men.push_back(PreferenceList{{0, 1, 2, 3}});
        inst.women.push_back(PreferenceList{{0, 1, 2, 3}});
    }
    StableSet set = enumerate_all_stable(inst);
    CHECK(set.all.size() == 1);
    CHECK(multiplicity_fraction(set) == 0.0);
}

TEST_CASE("oracle equals unpruned exhaustive search on random markets") {
    Rng rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        const std::int32_t n = 2 + static_cast<std::int32_t>(rng.below(2));
        const Instance inst = random_instance(rng, n, trial % 2 == 1);
        const StableSet set = enumerate_all_stable(inst);
        std::set<std::vector<std::int32_t>> got;
        for (const Matching& mu : set.all) got.insert(mu.man_partners());
        CHECK(got == naive_stable(inst));
        CHECK(got.size() == set.all.size());  // no duplicates
    }
}

TEST_CASE("partner lists are sorted best first and pairs add up") {
    Rng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const Instance inst = random_instance(rng, 4, trial % 2 == 0);
        const StableSet set = enumerate_all_stable(inst);
        REQUIRE(!set.all.empty());

        std::int64_t husband_total = 0;
        for (std::int32_t w = 0; w < inst.num_women(); ++w) {
            const auto& partners = set.woman_partners[static_cast<std::size_t>(w)];
            husband_total += static_cast<std::int64_t>(partners.size());
            const auto& her = inst.women[static_cast<std::size_t>(w)];
            for (std::size_t i = 0; i + 1 < partners.size(); ++i)
                CHECK(her.prefers(partners[i], partners[i + 1]));
        }
        CHECK(husband_total == count_stable_pairs(set));

        // matched-person set identical across the stable set
        for (const Matching& mu : set.all)
            for (std::int32_t m = 0; m < inst.num_men(); ++m)
                CHECK((mu.of_man(m) == kUnmatched) ==
                      set.man_partners[static_cast<std::size_t>(m)].empty());

        // best and worst bracket every member
        const Matching best = set.man_best();
        const Matching worst = set.man_worst();
        for (const Matching& mu : set.all)
            for (std::int32_t m = 0; m < inst.num_men(); ++m) {
                const auto& his = inst.men[static_cast<std::size_t>(m)];
                CHECK_FALSE(his.prefers(mu.of_man(m), best.of_man(m)));
                CHECK_FALSE(his.prefers(worst.of_man(m), mu.of_man(m)));
            }
        CHECK(set.man_worst() == set.woman_best());
    }
}

TEST_CASE("size guard refuses large markets") {
    Instance inst;
    for (int i = 0; i < 8; ++i) {
        inst.men.push_back(PreferenceList{{}});
        inst.women.push_back(PreferenceList{{}});
    }
    CHECK_THROWS_AS(enumerate_all_stable(inst), std::invalid_argument);
    CHECK_NOTHROW(enumerate_all_stable(inst, 8));
}
