#include "marketsim/algorithms.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace marketsim {

namespace {

// mutable proposal-process state shared by the initial run and the resumed one
struct ProposeState {
    std::vector<std::int32_t> next_choice;    // per man, next position in his list
    std::vector<std::int32_t> woman_partner;  // current holder, kUnmatched if none
};

ProposeState fresh_state(const Instance& inst) {
    ProposeState st;
    st.next_choice.assign(inst.men.size(), 0);
    st.woman_partner.assign(inst.women.size(), kUnmatched);
    return st;
}

}  // namespace

DeferredAcceptanceResult mpda(const Instance& inst, Schedule schedule) {
    RankIndex ranks(inst);
    return mpda(inst, ranks, schedule);
}

DeferredAcceptanceResult mpda(const Instance& inst, const RankIndex& ranks, Schedule schedule) {
    const std::int32_t num_men = inst.num_men();
    ProposeState st = fresh_state(inst);
    ProposalTrace trace;

    std::set<std::int32_t> free_men;
    for (std::int32_t m = 0; m < num_men; ++m)
        if (!inst.men[static_cast<std::size_t>(m)].order.empty()) free_men.insert(m);

    while (!free_men.empty()) {
        auto it = schedule == Schedule::LowestIndexFirst ? free_men.begin()
                                                         : std::prev(free_men.end());
        const std::int32_t m = *it;
        free_men.erase(it);

        const auto& list = inst.men[static_cast<std::size_t>(m)].order;
        const std::int32_t w = list[static_cast<std::size_t>(st.next_choice[m]++)];
        const std::int32_t holder = st.woman_partner[static_cast<std::size_t>(w)];

        if (ranks.woman_prefers(w, m, holder)) {
            st.woman_partner[static_cast<std::size_t>(w)] = m;
            trace.push_back({m, w, holder == kUnmatched ? Answer::Accepted : Answer::Displaced});
            if (holder != kUnmatched &&
                st.next_choice[holder] <
                    static_cast<std::int32_t>(inst.men[static_cast<std::size_t>(holder)].order.size()))
                free_men.insert(holder);
        } else {
            trace.push_back({m, w, Answer::Rejected});
            if (st.next_choice[m] < static_cast<std::int32_t>(list.size())) free_men.insert(m);
        }
    }

    return DeferredAcceptanceResult{
        Matching::from_woman_partners(st.woman_partner, num_men), std::move(trace)};
}

Instance transposed(const Instance& inst) {
    Instance out;
    out.men = inst.women;
    out.women = inst.men;
    return out;
}

Matching wpda(const Instance& inst) {
    DeferredAcceptanceResult flipped = mpda(transposed(inst));
    return Matching(flipped.matching.woman_partners(), flipped.matching.man_partners());
}

Instance augment_virtual_women(const Instance& inst) {
    Instance out = inst;
    const std::int32_t num_women = inst.num_women();
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        out.men[static_cast<std::size_t>(m)].order.push_back(num_women + m);
        PreferenceList only_him;
        only_him.order = {m};
        out.women.push_back(std::move(only_him));
    }
    return out;
}

HusbandEnumeration enumerate_stable_husbands(const Instance& inst, std::int32_t woman) {
    RankIndex ranks(inst);
    return enumerate_stable_husbands(inst, ranks, woman);
}

HusbandEnumeration enumerate_stable_husbands(const Instance& inst, const RankIndex& ranks,
                                             std::int32_t woman) {
    if (woman < 0 || woman >= inst.num_women())
        throw std::out_of_range("woman index out of range");

    HusbandEnumeration out;
    out.woman = woman;

    DeferredAcceptanceResult initial = mpda(inst, ranks);
    for (const ProposalEvent& e : initial.trace)
        if (e.target == woman) out.initial_proposers.push_back(e.proposer);

    std::int32_t proposer = initial.matching.of_woman(woman);
    if (proposer == kUnmatched) return out;  // she is single in every stable matching

    // resume the process with her partner released and her answering "no" to
    // everyone; each proposal she receives is her next candidate husband
    ProposeState st = fresh_state(inst);
    st.woman_partner = initial.matching.woman_partners();
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        const auto& list = inst.men[static_cast<std::size_t>(m)].order;
        std::int32_t w = initial.matching.of_man(m);
        st.next_choice[m] = w == kUnmatched
                                ? static_cast<std::int32_t>(list.size())
                                : ranks.man_rank(m, w) + 1;
    }
    std::vector<bool> ever_matched(inst.women.size(), false);
    for (std::size_t w = 0; w < inst.women.size(); ++w)
        ever_matched[w] = st.woman_partner[w] != kUnmatched;
    st.woman_partner[static_cast<std::size_t>(woman)] = kUnmatched;

    out.proposals.push_back(proposer);
    while (st.next_choice[proposer] <
           static_cast<std::int32_t>(inst.men[static_cast<std::size_t>(proposer)].order.size())) {
        const auto& list = inst.men[static_cast<std::size_t>(proposer)].order;
        const std::int32_t w = list[static_cast<std::size_t>(st.next_choice[proposer]++)];
        if (w == woman) {
            out.proposals.push_back(proposer);
            continue;
        }
        if (!ever_matched[static_cast<std::size_t>(w)]) break;
        const std::int32_t holder = st.woman_partner[static_cast<std::size_t>(w)];
        if (ranks.woman_prefers(w, proposer, holder)) {
            st.woman_partner[static_cast<std::size_t>(w)] = proposer;
            proposer = holder;
        }
    }

    // the strictly-improving prefix maxima of the proposal stream are exactly
    // her stable husbands, worst to best
    std::int32_t best = out.proposals.front();
    out.husbands.push_back(best);
    for (std::size_t i = 1; i < out.proposals.size(); ++i) {
        if (ranks.woman_prefers(woman, out.proposals[i], best)) {
            best = out.proposals[i];
            out.husbands.push_back(best);
        }
    }
    return out;
}

HusbandEnumeration enumerate_stable_husbands(const Instance& inst, std::int32_t woman,
                                             const PopularityList& weights, Rng& rng) {
    if (woman < 0 || woman >= inst.num_women())
        throw std::out_of_range("woman index out of range");
    Instance resampled = inst;
    resampled.women[static_cast<std::size_t>(woman)] = sample_popularity_list(weights, rng);
    return enumerate_stable_husbands(resampled, woman);
}

namespace {

// relabel women so the man-optimal matching is the identity; requires every
// man matched
std::vector<std::int32_t> relabel_by_matching(const Instance& inst, const Matching& man_optimal) {
    std::vector<std::int32_t> relabel(inst.men.size(), kUnmatched);
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        std::int32_t w = man_optimal.of_man(m);
        if (w == kUnmatched)
            throw std::invalid_argument("block structure needs every man matched; augment first");
        relabel[static_cast<std::size_t>(m)] = w;
    }
    return relabel;
}

// furthest_interest[i]: largest j such that woman relabel[i] weakly prefers
// man j to her partner i (at least i itself)
std::vector<std::int32_t> furthest_interest(const RankIndex& ranks,
                                            const std::vector<std::int32_t>& relabel) {
    const std::int32_t n = static_cast<std::int32_t>(relabel.size());
    std::vector<std::int32_t> furthest(relabel.size());
    for (std::int32_t i = 0; i < n; ++i) {
        const std::int32_t w = relabel[static_cast<std::size_t>(i)];
        std::int32_t best = i;
        for (std::int32_t j = i + 1; j < n; ++j)
            if (ranks.woman_prefers(w, j, i)) best = j;
        furthest[static_cast<std::size_t>(i)] = best;
    }
    return furthest;
}

}  // namespace

std::vector<Block> BlockDecomposition::blocks() const {
    std::vector<Block> out;
    for (std::size_t k = 0; k + 1 < separators.size(); ++k)
        out.push_back(Block{separators[k], separators[k + 1]});
    return out;
}

BlockDecomposition block_decomposition(const Instance& inst, const Matching& man_optimal,
                                       std::int32_t num_real_women) {
    BlockDecomposition out;
    out.relabel = relabel_by_matching(inst, man_optimal);
    const std::int32_t n = static_cast<std::int32_t>(out.relabel.size());
    out.virtual_row.resize(out.relabel.size());
    for (std::size_t i = 0; i < out.relabel.size(); ++i)
        out.virtual_row[i] = out.relabel[i] >= num_real_women;

    RankIndex ranks(inst);
    const std::vector<std::int32_t> furthest = furthest_interest(ranks, out.relabel);

    // t is a separator iff no woman before t looks at t or beyond
    out.separators.push_back(0);
    std::int32_t reach = 0;
    for (std::int32_t t = 1; t <= n; ++t) {
        reach = std::max(reach, furthest[static_cast<std::size_t>(t - 1)] + 1);
        if (reach <= t) out.separators.push_back(t);
    }
    return out;
}

Block compute_block(const Instance& inst, const Matching& man_optimal, std::int32_t n) {
    const std::vector<std::int32_t> relabel = relabel_by_matching(inst, man_optimal);
    const std::int32_t count = static_cast<std::int32_t>(relabel.size());
    if (n < 0 || n >= count) throw std::out_of_range("pair index out of range");
    RankIndex ranks(inst);
    const std::vector<std::int32_t> furthest = furthest_interest(ranks, relabel);

    // grow the left edge downward while some woman at or above it looks right
    std::int32_t l = n;
    while (l > 0) {
        bool crossed = false;
        for (std::int32_t i = l - 1; i >= 0 && !crossed; --i)
            if (furthest[static_cast<std::size_t>(i)] >= l) {
                l = i;
                crossed = true;
            }
        if (!crossed) break;
    }
    // grow the right edge upward while some woman inside looks past it
    std::int32_t r = n + 1;
    while (r < count) {
        std::int32_t extent = r;
        for (std::int32_t i = l; i < r; ++i)
            extent = std::max(extent, furthest[static_cast<std::size_t>(i)] + 1);
        if (extent == r) break;
        r = extent;
    }
    return Block{l, r};
}

BlockContext make_block_context(const Instance& inst) {
    BlockContext ctx;
    ctx.instance = inst;
    DeferredAcceptanceResult da = mpda(ctx.instance);
    bool all_matched = true;
    for (std::int32_t m = 0; m < ctx.instance.num_men(); ++m)
        all_matched = all_matched && da.matching.of_man(m) != kUnmatched;
    if (!all_matched) {
        ctx.instance = augment_virtual_women(inst);
        ctx.augmented = true;
        da = mpda(ctx.instance);
    }
    ctx.man_optimal = da.matching;
    ctx.decomposition = block_decomposition(ctx.instance, ctx.man_optimal, inst.num_women());
    return ctx;
}

RankGapComponents rank_gap_components(const Instance& inst, const Matching& man_optimal,
                                      std::int32_t n) {
    RankGapComponents out;
    out.block = compute_block(inst, man_optimal, n);

    const std::vector<std::int32_t> relabel = relabel_by_matching(inst, man_optimal);
    const std::int32_t w = relabel[static_cast<std::size_t>(n)];
    const std::int32_t l = out.block.l;

    // walk her list from the top to her partner, counting prefix men that sit
    // below some already-seen suffix man
    bool seen_suffix_man = false;
    for (std::int32_t m : inst.women[static_cast<std::size_t>(w)].order) {
        if (m == n) break;
        if (m < l && seen_suffix_man) ++out.x;
        if (m >= l) seen_suffix_man = true;
    }
    return out;
}

}  // namespace marketsim
