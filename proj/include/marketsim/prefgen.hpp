#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marketsim/core.hpp"
#include "marketsim/rng.hpp"

namespace marketsim {

// One person's sampling weights over their acceptable partners, in log-space
// (weights like 0.99^200 underflow linear doubles composed over ratios).
// An empty support means "no weights": the person keeps a fixed list.
struct PopularityList {
    std::vector<std::int32_t> support;  // partner indices, ascending
    std::vector<double> log_weight;     // parallel to support

    bool empty() const { return support.empty(); }

    std::optional<double> find_log_weight(std::int32_t partner) const {
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] == partner) return log_weight[i];
        return std::nullopt;
    }
};

struct PopularityModel {
    std::vector<PopularityList> women;  // weights women put on men; may be empty
    std::vector<PopularityList> men;    // optional men side

    bool has_women_side() const;
    bool has_men_side() const;
};

struct GaussianModel {
    double sigma;  // common value of man m_i is i; noise is Normal(0, sigma^2)
};

struct ModelDescriptor {
    std::string model;  // uniform | master | gaussian | popularity | swap | grouped | folklore
    std::int32_t num_men = 0;
    std::int32_t num_women = 0;
    bool seeded = false;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;
};

struct BuiltInstance {
    Instance instance;
    ModelDescriptor descriptor;
    PopularityModel popularity;  // both sides empty unless the model has weights
};

// Plackett-Luce order via the exponential-race construction: key = log w + Gumbel,
// sorted descending; equal in distribution to sequential weighted draws.
// Ties (measure zero) break toward the lower index.
PreferenceList sample_popularity_list(const PopularityList& weights, Rng& rng);

// men ordered by ascending i + Normal(0, sigma^2); ties break toward lower index
PreferenceList sample_gaussian_list(std::int32_t num_men, double sigma, Rng& rng);

// every list an independent uniform permutation of the opposite side;
// complete=false has no defined semantics and is rejected
BuiltInstance build_uniform(std::int32_t num_men, std::int32_t num_women, bool complete,
                            Stream trial);

// women all rank [0..M-1]; men's lists identity (no rng) or uniform (rng)
BuiltInstance build_master_list(std::int32_t num_men, std::int32_t num_women);
BuiltInstance build_master_list(std::int32_t num_men, std::int32_t num_women, Stream trial);

// D_w(m_i) = lambda^i for every woman, complete acceptability, log-space
PopularityModel geometric_popularity(std::int32_t num_men, std::int32_t num_women, double lambda);

// all-equal weights for one side (handy for spread computations)
PopularityList uniform_weights(std::int32_t count);

// samples every list whose side carries weights; sides without weights get
// uniform permutations
BuiltInstance build_popularity(const PopularityModel& model, std::int32_t num_men,
                               std::int32_t num_women, Stream trial);

// women sample Gaussian orders, men uniform
BuiltInstance build_gaussian(std::int32_t num_men, std::int32_t num_women, double sigma,
                             Stream trial);

// each person's list starts as the identity and each adjacent pair (2i, 2i+1)
// is swapped independently with probability 1/2; N even
BuiltInstance build_swap_pairs(std::int32_t n, Stream trial);

// acceptability only within groups {2i, 2i+1} on both sides; within-group
// orders uniform; N even
BuiltInstance build_grouped_incomplete(std::int32_t n, Stream trial);

// Cyclic construction: man m_i ranks [w_{i+1}, w_{i+2}, ..., w_i] (mod N),
// woman w_k (k >= 1) ranks [m_k, m_{k+1}, ..., m_{k-1}] (mod N), and woman
// w_0 carries popularity weights D(m_i) = lambda^{i+1} instead of a fixed
// list. Without a stream her list is left empty (materialize before running
// anything that needs her answers); with a stream it is sampled from the
// weights.
BuiltInstance build_folklore_cyclic(std::int32_t n, double lambda);
BuiltInstance build_folklore_cyclic(std::int32_t n, double lambda, Stream trial);

// Worst-case odds that a list ranks m_{i+k} before m_i.
// Popularity: pairwise marginal P[a before b] = w_a/(w_a+w_b), so the odds is
// the weight ratio, maximized over women and over i with both men acceptable.
// Master list: 0. Gaussian: 2 exp(-(k/(2 sigma))^2).
double inversion_odds(const PopularityModel& model, std::int32_t k);
double inversion_odds(const GaussianModel& model, std::int32_t k);
struct MasterListModel {};
double inversion_odds(MasterListModel, std::int32_t k);

struct PopularitySpreads {
    double r_men;    // max over men of the ratio between two of his weights
    double q_women;  // max over woman pairs of the cross ratio discrepancy
};

// requires both sides weighted with complete acceptability; log-space maxima
PopularitySpreads popularity_spreads(const PopularityModel& model, std::int32_t num_men,
                                     std::int32_t num_women);

}  // namespace marketsim
