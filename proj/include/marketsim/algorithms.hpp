#pragma once

#include <cstdint>
#include <vector>

#include "marketsim/core.hpp"
#include "marketsim/prefgen.hpp"
#include "marketsim/rng.hpp"

namespace marketsim {

enum class Answer : std::uint8_t { Rejected, Accepted, Displaced };

struct ProposalEvent {
    std::int32_t proposer;  // man index
    std::int32_t target;    // woman index
    Answer answer;          // Displaced means accepted while dropping a prior partner

    friend bool operator==(const ProposalEvent&, const ProposalEvent&) = default;
};

using ProposalTrace = std::vector<ProposalEvent>;

struct DeferredAcceptanceResult {
    Matching matching;
    ProposalTrace trace;
};

// which free man proposes next; the outcome is schedule-invariant
enum class Schedule : std::uint8_t { LowestIndexFirst, HighestIndexFirst };

// man-proposing deferred acceptance; yields the man-optimal stable matching
DeferredAcceptanceResult mpda(const Instance& inst,
                              Schedule schedule = Schedule::LowestIndexFirst);
DeferredAcceptanceResult mpda(const Instance& inst, const RankIndex& ranks,
                              Schedule schedule = Schedule::LowestIndexFirst);

// swaps the two sides (list i of the result's men is list i of inst's women)
Instance transposed(const Instance& inst);

// woman-proposing run, reported in the original orientation
Matching wpda(const Instance& inst);

// Appends one private woman per man: man m's list gains woman W+m at the very
// end, and woman W+m ranks only man m. Every man is matched in every stable
// matching of the result, and stable matchings correspond one-to-one.
Instance augment_virtual_women(const Instance& inst);

// Stable husbands of one woman, found by a single resumed proposal process.
struct HusbandEnumeration {
    std::int32_t woman = kUnmatched;
    // distinct stable husbands, worst to best by her list; empty when she is
    // unmatched; front is the man-optimal partner, back the woman-optimal one
    std::vector<std::int32_t> husbands;
    // every proposal she received after the initial run, preceded by her
    // initial partner; husbands is the strictly-improving subsequence
    std::vector<std::int32_t> proposals;
    // men who proposed to her during the initial run, in arrival order
    std::vector<std::int32_t> initial_proposers;
};

HusbandEnumeration enumerate_stable_husbands(const Instance& inst, std::int32_t woman);
HusbandEnumeration enumerate_stable_husbands(const Instance& inst, const RankIndex& ranks,
                                             std::int32_t woman);
// substitutes a freshly sampled list for the woman before enumerating
HusbandEnumeration enumerate_stable_husbands(const Instance& inst, std::int32_t woman,
                                             const PopularityList& weights, Rng& rng);

// Pairs are indexed by man after relabeling women so that the man-optimal
// matching is the identity. A prefix length t splits the market when no woman
// in the prefix prefers a suffix man to her partner; every stable matching
// then matches prefix to prefix and suffix to suffix. A block is the span
// between adjacent separators: pairs l..r-1.
struct Block {
    std::int32_t l = 0;
    std::int32_t r = 0;

    friend bool operator==(const Block&, const Block&) = default;
};

struct BlockDecomposition {
    std::vector<std::int32_t> relabel;      // relabel[i] = woman matched to man i
    std::vector<std::int32_t> separators;   // 0 = t_0 < t_1 < ... < t_b = N
    std::vector<bool> virtual_row;          // relabel[i] is an appended woman

    std::vector<Block> blocks() const;
};

// requires every man matched (augment first otherwise)
BlockDecomposition block_decomposition(const Instance& inst, const Matching& man_optimal,
                                       std::int32_t num_real_women);

// Smallest block around pair n, by the literal two-scan construction: push the
// left edge down past every woman who looks past it, then push the right edge
// up past every man some prefix woman prefers. Exercised against the
// decomposition in tests; the decomposition is the fast path.
Block compute_block(const Instance& inst, const Matching& man_optimal, std::int32_t n);

// augments when some man is single, so the decomposition always applies
struct BlockContext {
    Instance instance;   // possibly augmented
    Matching man_optimal;
    BlockDecomposition decomposition;
    bool augmented = false;
};

BlockContext make_block_context(const Instance& inst);

// Certified gap anatomy for one pair: the gap between the ranks woman n gives
// her worst and best stable husbands is at most x + r - l - 1, where [l, r)
// is her block and x counts prefix men she ranks between some suffix man and
// her partner.
struct RankGapComponents {
    Block block;
    std::int32_t x = 0;

    std::int32_t bound() const { return x + block.r - block.l - 1; }
};

RankGapComponents rank_gap_components(const Instance& inst, const Matching& man_optimal,
                                      std::int32_t n);

}  // namespace marketsim
