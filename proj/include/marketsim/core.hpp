#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace marketsim {

enum class Side : std::uint8_t { Men = 0, Women = 1 };

inline Side opposite(Side s) { return s == Side::Men ? Side::Women : Side::Men; }

struct PersonId {
    Side side;
    std::int32_t index;
    friend bool operator==(const PersonId&, const PersonId&) = default;
};

// partner value meaning "single"
constexpr std::int32_t kUnmatched = -1;

// rank value meaning "absent from the list"
constexpr std::int32_t kNotAcceptable = std::numeric_limits<std::int32_t>::max();

// Strict preference order over acceptable partners, favorite first.
// Membership is acceptability: anyone absent is unacceptable.
struct PreferenceList {
    std::vector<std::int32_t> order;

    // 0-based position of partner, or kNotAcceptable if absent
    std::int32_t rank_of(std::int32_t partner) const {
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i] == partner) return static_cast<std::int32_t>(i);
        return kNotAcceptable;
    }

    // total "prefers" order: acceptable beats single beats unacceptable;
    // kUnmatched stands for single
    std::int32_t effective_rank(std::int32_t partner) const {
        if (partner == kUnmatched) return static_cast<std::int32_t>(order.size());
        return rank_of(partner);
    }

    bool prefers(std::int32_t a, std::int32_t b) const {
        return effective_rank(a) < effective_rank(b);
    }
};

struct Instance {
    std::vector<PreferenceList> men;    // men[i].order holds woman indices
    std::vector<PreferenceList> women;  // women[j].order holds man indices

    std::int32_t num_men() const { return static_cast<std::int32_t>(men.size()); }
    std::int32_t num_women() const { return static_cast<std::int32_t>(women.size()); }

    const PreferenceList& list_of(PersonId p) const {
        return p.side == Side::Men ? men[static_cast<std::size_t>(p.index)]
                                   : women[static_cast<std::size_t>(p.index)];
    }
};

// Self-inverse pairing with singles; consistency checked on construction.
class Matching {
  public:
    Matching() = default;  // the empty market
    Matching(std::vector<std::int32_t> man_partner, std::vector<std::int32_t> woman_partner);

    // builds the woman side from the man side, and vice versa
    static Matching from_man_partners(std::vector<std::int32_t> man_partner,
                                      std::int32_t num_women);
    static Matching from_woman_partners(std::vector<std::int32_t> woman_partner,
                                        std::int32_t num_men);

    std::int32_t of_man(std::int32_t m) const { return man_partner_[static_cast<std::size_t>(m)]; }
    std::int32_t of_woman(std::int32_t w) const {
        return woman_partner_[static_cast<std::size_t>(w)];
    }
    std::int32_t of(PersonId p) const {
        return p.side == Side::Men ? of_man(p.index) : of_woman(p.index);
    }

    const std::vector<std::int32_t>& man_partners() const { return man_partner_; }
    const std::vector<std::int32_t>& woman_partners() const { return woman_partner_; }

    std::int32_t num_men() const { return static_cast<std::int32_t>(man_partner_.size()); }
    std::int32_t num_women() const { return static_cast<std::int32_t>(woman_partner_.size()); }

    friend bool operator==(const Matching&, const Matching&) = default;

  private:
    std::vector<std::int32_t> man_partner_;
    std::vector<std::int32_t> woman_partner_;
};

// empty when well-formed; each violation names the list and position
std::vector<std::string> validate_instance(const Instance& inst);

// m strictly prefers w to his partner and w strictly prefers m to hers
bool is_blocking_pair(const Instance& inst, const Matching& mu, std::int32_t m, std::int32_t w);

// no blocking pair and nobody matched to a partner absent from their list
bool is_stable(const Instance& inst, const Matching& mu);

std::vector<std::pair<std::int32_t, std::int32_t>> blocking_pairs(const Instance& inst,
                                                                  const Matching& mu);

// O(1) rank lookups; rows are persons, columns opposite-side partners.
// Built once per instance by anything that compares preferences in a loop.
class RankIndex {
  public:
    explicit RankIndex(const Instance& inst);

    std::int32_t man_rank(std::int32_t m, std::int32_t w) const {
        if (w == kUnmatched) return men_len_[static_cast<std::size_t>(m)];
        return mrank_[static_cast<std::size_t>(m) * num_women_ + static_cast<std::size_t>(w)];
    }
    std::int32_t woman_rank(std::int32_t w, std::int32_t m) const {
        if (m == kUnmatched) return women_len_[static_cast<std::size_t>(w)];
        return wrank_[static_cast<std::size_t>(w) * num_men_ + static_cast<std::size_t>(m)];
    }

    bool man_prefers(std::int32_t m, std::int32_t a, std::int32_t b) const {
        return man_rank(m, a) < man_rank(m, b);
    }
    bool woman_prefers(std::int32_t w, std::int32_t a, std::int32_t b) const {
        return woman_rank(w, a) < woman_rank(w, b);
    }

  private:
    std::size_t num_men_;
    std::size_t num_women_;
    std::vector<std::int32_t> mrank_;      // M x W, kNotAcceptable when absent
    std::vector<std::int32_t> wrank_;      // W x M
    std::vector<std::int32_t> men_len_;    // effective rank of "single"
    std::vector<std::int32_t> women_len_;
};

}  // namespace marketsim
