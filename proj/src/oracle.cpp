#include "marketsim/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace marketsim {

namespace {

struct Search {
    const Instance& inst;
    RankIndex ranks;
    std::vector<std::int32_t> man_partner;
    std::vector<std::int32_t> woman_partner;
    std::vector<Matching> found;

    explicit Search(const Instance& i)
        : inst(i),
          ranks(i),
          man_partner(static_cast<std::size_t>(i.num_men()), kUnmatched),
          woman_partner(static_cast<std::size_t>(i.num_women()), kUnmatched) {}

    // blocking check restricted to persons whose final partner is decided:
    // men < next and every matched woman (her partner cannot change later)
    bool creates_block(std::int32_t next) {
        std::int32_t k = next - 1;  // the man just assigned
        std::int32_t his = man_partner[static_cast<std::size_t>(k)];
        // (k, w') for matched w'
        for (std::int32_t w = 0; w < inst.num_women(); ++w) {
            std::int32_t hers = woman_partner[static_cast<std::size_t>(w)];
            if (hers == kUnmatched || hers == k) continue;
            if (ranks.man_rank(k, w) < ranks.man_rank(k, his) &&
                ranks.woman_rank(w, k) < ranks.woman_rank(w, hers))
                return true;
        }
        // (m, his) for decided m; his partner just became final
        if (his != kUnmatched) {
            for (std::int32_t m = 0; m < k; ++m)
                if (ranks.man_rank(m, his) <
                        ranks.man_rank(m, man_partner[static_cast<std::size_t>(m)]) &&
                    ranks.woman_rank(his, m) < ranks.woman_rank(his, k))
                    return true;
        }
        return false;
    }

    void recurse(std::int32_t next) {
        if (next == inst.num_men()) {
            Matching mu(man_partner, woman_partner);
            if (is_stable(inst, mu)) found.push_back(std::move(mu));
            return;
        }
        const auto& his = inst.men[static_cast<std::size_t>(next)].order;
        for (std::int32_t w : his) {
            if (woman_partner[static_cast<std::size_t>(w)] != kUnmatched) continue;
            if (ranks.woman_rank(w, next) == kNotAcceptable) continue;  // she would block alone
            man_partner[static_cast<std::size_t>(next)] = w;
            woman_partner[static_cast<std::size_t>(w)] = next;
            if (!creates_block(next + 1)) recurse(next + 1);
            man_partner[static_cast<std::size_t>(next)] = kUnmatched;
            woman_partner[static_cast<std::size_t>(w)] = kUnmatched;
        }
        man_partner[static_cast<std::size_t>(next)] = kUnmatched;
        if (!creates_block(next + 1)) recurse(next + 1);
    }
};

}  // namespace

StableSet enumerate_all_stable(const Instance& inst, std::int32_t guard) {
    if (std::min(inst.num_men(), inst.num_women()) > guard)
        throw std::invalid_argument("oracle guard exceeded: instance too large");
    Search s(inst);
    s.recurse(0);

    StableSet out;
    out.all = std::move(s.found);
    out.man_partners.resize(static_cast<std::size_t>(inst.num_men()));
    out.woman_partners.resize(static_cast<std::size_t>(inst.num_women()));
    RankIndex ranks(inst);
    for (const auto& mu : out.all) {
        for (std::int32_t m = 0; m < inst.num_men(); ++m)
            if (mu.of_man(m) != kUnmatched)
                out.man_partners[static_cast<std::size_t>(m)].push_back(mu.of_man(m));
        for (std::int32_t w = 0; w < inst.num_women(); ++w)
            if (mu.of_woman(w) != kUnmatched)
                out.woman_partners[static_cast<std::size_t>(w)].push_back(mu.of_woman(w));
    }
    for (std::int32_t m = 0; m < inst.num_men(); ++m) {
        auto& ps = out.man_partners[static_cast<std::size_t>(m)];
        std::sort(ps.begin(), ps.end(), [&](std::int32_t a, std::int32_t b) {
            return ranks.man_rank(m, a) < ranks.man_rank(m, b);
        });
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    }
    for (std::int32_t w = 0; w < inst.num_women(); ++w) {
        auto& ps = out.woman_partners[static_cast<std::size_t>(w)];
        std::sort(ps.begin(), ps.end(), [&](std::int32_t a, std::int32_t b) {
            return ranks.woman_rank(w, a) < ranks.woman_rank(w, b);
        });
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    }
    return out;
}

Matching StableSet::man_best() const {
    std::vector<std::int32_t> mp(man_partners.size(), kUnmatched);
    for (std::size_t m = 0; m < man_partners.size(); ++m)
        if (!man_partners[m].empty()) mp[m] = man_partners[m].front();
    return Matching::from_man_partners(std::move(mp),
                                       static_cast<std::int32_t>(woman_partners.size()));
}

Matching StableSet::man_worst() const {
    std::vector<std::int32_t> mp(man_partners.size(), kUnmatched);
    for (std::size_t m = 0; m < man_partners.size(); ++m)
        if (!man_partners[m].empty()) mp[m] = man_partners[m].back();
    return Matching::from_man_partners(std::move(mp),
                                       static_cast<std::int32_t>(woman_partners.size()));
}

Matching StableSet::woman_best() const {
    std::vector<std::int32_t> wp(woman_partners.size(), kUnmatched);
    std::vector<std::int32_t> mp(man_partners.size(), kUnmatched);
    for (std::size_t w = 0; w < woman_partners.size(); ++w)
        if (!woman_partners[w].empty()) {
            wp[w] = woman_partners[w].front();
            mp[static_cast<std::size_t>(wp[w])] = static_cast<std::int32_t>(w);
        }
    return Matching(std::move(mp), std::move(wp));
}

std::int32_t count_stable_pairs(const StableSet& ss) {
    std::int32_t total = 0;
    for (const auto& ps : ss.woman_partners) total += static_cast<std::int32_t>(ps.size());
    return total;
}

double multiplicity_fraction(const StableSet& ss) {
    std::int32_t multi = 0;
    for (const auto& ps : ss.man_partners) multi += ps.size() >= 2 ? 1 : 0;
    for (const auto& ps : ss.woman_partners) multi += ps.size() >= 2 ? 1 : 0;
    std::size_t persons = ss.man_partners.size() + ss.woman_partners.size();
    return persons == 0 ? 0.0 : static_cast<double>(multi) / static_cast<double>(persons);
}

}  // namespace marketsim
