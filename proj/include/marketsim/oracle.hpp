#pragma once

#include <cstdint>
#include <vector>

#include "marketsim/core.hpp"

namespace marketsim {

// Exhaustive ground truth on small instances.
struct StableSet {
    std::vector<Matching> all;  // every stable matching, in enumeration order

    // distinct stable partners per person, each sorted by that person's
    // preference, best first; empty means single in every stable matching
    std::vector<std::vector<std::int32_t>> man_partners;
    std::vector<std::vector<std::int32_t>> woman_partners;

    // matching where every man gets his best stable partner, and dually
    Matching man_best() const;
    Matching woman_best() const;
    Matching man_worst() const;
};

// Recursion over men, assigning each an acceptable woman or leaving him
// single; a partial assignment is pruned only when two persons whose final
// partners are already decided form a blocking pair, so no stable extension
// is ever lost. Every leaf is checked with is_stable.
StableSet enumerate_all_stable(const Instance& inst, std::int32_t guard = 7);

// number of distinct matched pairs across all members
std::int32_t count_stable_pairs(const StableSet& ss);

// fraction of the M + W persons with at least two distinct stable partners
double multiplicity_fraction(const StableSet& ss);

}  // namespace marketsim
