#include "marketsim/core.hpp"

#include <stdexcept>

namespace marketsim {

Matching::Matching(std::vector<std::int32_t> man_partner, std::vector<std::int32_t> woman_partner)
    : man_partner_(std::move(man_partner)), woman_partner_(std::move(woman_partner)) {
    auto check = [](const std::vector<std::int32_t>& fwd, const std::vector<std::int32_t>& bwd,
                    const char* what) {
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            std::int32_t p = fwd[i];
            if (p == kUnmatched) continue;
            if (p < 0 || static_cast<std::size_t>(p) >= bwd.size() ||
                bwd[static_cast<std::size_t>(p)] != static_cast<std::int32_t>(i))
                throw std::invalid_argument(std::string("matching is not self-inverse at ") + what);
        }
    };
    check(man_partner_, woman_partner_, "a man");
    check(woman_partner_, man_partner_, "a woman");
}

Matching Matching::from_man_partners(std::vector<std::int32_t> man_partner,
                                     std::int32_t num_women) {
    std::vector<std::int32_t> woman_partner(static_cast<std::size_t>(num_women), kUnmatched);
    for (std::size_t m = 0; m < man_partner.size(); ++m) {
        std::int32_t w = man_partner[m];
        if (w == kUnmatched) continue;
        if (w < 0 || w >= num_women)
            throw std::invalid_argument("woman index out of range in matching");
        if (woman_partner[static_cast<std::size_t>(w)] != kUnmatched)
            throw std::invalid_argument("two men share a woman in matching");
        woman_partner[static_cast<std::size_t>(w)] = static_cast<std::int32_t>(m);
    }
    return Matching(std::move(man_partner), std::move(woman_partner));
}

Matching Matching::from_woman_partners(std::vector<std::int32_t> woman_partner,
                                       std::int32_t num_men) {
    std::vector<std::int32_t> man_partner(static_cast<std::size_t>(num_men), kUnmatched);
    for (std::size_t w = 0; w < woman_partner.size(); ++w) {
        std::int32_t m = woman_partner[w];
        if (m == kUnmatched) continue;
        if (m < 0 || m >= num_men)
            throw std::invalid_argument("man index out of range in matching");
        if (man_partner[static_cast<std::size_t>(m)] != kUnmatched)
            throw std::invalid_argument("two women share a man in matching");
        man_partner[static_cast<std::size_t>(m)] = static_cast<std::int32_t>(w);
    }
    return Matching(std::move(man_partner), std::move(woman_partner));
}

std::vector<std::string> validate_instance(const Instance& inst) {
    std::vector<std::string> issues;
    auto check_side = [&issues](const std::vector<PreferenceList>& lists, std::int32_t limit,
                                const char* side_name) {
        for (std::size_t p = 0; p < lists.size(); ++p) {
            std::vector<bool> seen(static_cast<std::size_t>(limit), false);
            const auto& order = lists[p].order;
            for (std::size_t pos = 0; pos < order.size(); ++pos) {
                std::int32_t e = order[pos];
                if (e < 0 || e >= limit) {
                    issues.push_back(std::string(side_name) + " " + std::to_string(p) +
                                     " position " + std::to_string(pos) + ": index " +
                                     std::to_string(e) + " out of range");
                    continue;
                }
                if (seen[static_cast<std::size_t>(e)])
                    issues.push_back(std::string(side_name) + " " + std::to_string(p) +
                                     " position " + std::to_string(pos) + ": duplicate entry " +
                                     std::to_string(e));
                seen[static_cast<std::size_t>(e)] = true;
            }
        }
    };
    check_side(inst.men, inst.num_women(), "man");
    check_side(inst.women, inst.num_men(), "woman");
    return issues;
}

bool is_blocking_pair(const Instance& inst, const Matching& mu, std::int32_t m, std::int32_t w) {
    if (m < 0 || m >= inst.num_men() || w < 0 || w >= inst.num_women())
        throw std::out_of_range("person index out of range");
    const auto& his = inst.men[static_cast<std::size_t>(m)];
    const auto& hers = inst.women[static_cast<std::size_t>(w)];
    return his.prefers(w, mu.of_man(m)) && hers.prefers(m, mu.of_woman(w));
}

bool is_stable(const Instance& inst, const Matching& mu) {
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        std::int32_t w = mu.of_man(m);
        if (w != kUnmatched && inst.men[static_cast<std::size_t>(m)].rank_of(w) == kNotAcceptable)
            return false;
    }
    for (std::int32_t w = 0; w < inst.num_women(); ++w) {
        std::int32_t m = mu.of_woman(w);
        if (m != kUnmatched && inst.women[static_cast<std::size_t>(w)].rank_of(m) == kNotAcceptable)
            return false;
    }
    RankIndex ranks(inst);
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        std::int32_t his = mu.of_man(m);
        for (std::int32_t w = 0; w < inst.num_women(); ++w)
            if (ranks.man_rank(m, w) < ranks.man_rank(m, his) &&
                ranks.woman_rank(w, m) < ranks.woman_rank(w, mu.of_woman(w)))
                return false;
    }
    return true;
}

std::vector<std::pair<std::int32_t, std::int32_t>> blocking_pairs(const Instance& inst,
                                                                  const Matching& mu) {
    std::vector<std::pair<std::int32_t, std::int32_t>> out;
    RankIndex ranks(inst);
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        std::int32_t his = mu.of_man(m);
        for (std::int32_t w = 0; w < inst.num_women(); ++w)
            if (ranks.man_rank(m, w) < ranks.man_rank(m, his) &&
                ranks.woman_rank(w, m) < ranks.woman_rank(w, mu.of_woman(w)))
                out.emplace_back(m, w);
    }
    return out;
}

RankIndex::RankIndex(const Instance& inst)
    : num_men_(inst.men.size()),
      num_women_(inst.women.size()),
      mrank_(num_men_ * num_women_, kNotAcceptable),
      wrank_(num_women_ * num_men_, kNotAcceptable),
      men_len_(num_men_),
      women_len_(num_women_) {
    for (std::size_t m = 0; m < num_men_; ++m) {
        const auto& order = inst.men[m].order;
        men_len_[m] = static_cast<std::int32_t>(order.size());
        for (std::size_t r = 0; r < order.size(); ++r)
            mrank_[m * num_women_ + static_cast<std::size_t>(order[r])] =
                static_cast<std::int32_t>(r);
    }
    for (std::size_t w = 0; w < num_women_; ++w) {
        const auto& order = inst.women[w].order;
        women_len_[w] = static_cast<std::int32_t>(order.size());
        for (std::size_t r = 0; r < order.size(); ++r)
            wrank_[w * num_men_ + static_cast<std::size_t>(order[r])] =
                static_cast<std::int32_t>(r);
    }
}

}  // namespace marketsim
