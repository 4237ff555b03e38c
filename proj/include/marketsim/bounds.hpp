#pragma once

#include <cstdint>
#include <vector>

#include "marketsim/rng.hpp"

namespace marketsim {

// Inversion-odds sequence u_1, u_2, ...: u_k bounds the odds that a sampled
// list ranks a pair of candidates k apart in the "wrong" order. Either a
// finite vector (zero beyond kmax) or a geometric tail u_k = a * rho^k summed
// in closed form.
class UkSequence {
  public:
    static UkSequence from_values(std::vector<double> values);  // u_1..u_kmax
    static UkSequence geometric(double a, double rho);

    double at(std::int32_t k) const;  // u_k, k >= 1

    double weighted_sum() const;     // sum over k of k * u_k
    double weighted_sq_sum() const;  // sum over k of k^2 * u_k

    // sum over k >= delta of k * u_k
    double tail_weighted_sum(std::int32_t delta) const;

    // finite form cut at kmax; a geometric tail folds its remainder into the
    // last entry conservatively: sum_{k > kmax} k u_k <= a rho^{kmax+1} (kmax+2) / (1-rho)^2
    UkSequence truncated(std::int32_t kmax) const;

    bool is_geometric() const { return geometric_; }

  private:
    UkSequence() = default;

    bool geometric_ = false;
    double a_ = 0.0;
    double rho_ = 0.0;
    std::vector<double> values_;
};

// finite vector u_k = 2 exp(-(k / 2 sigma)^2), cut where terms underflow
UkSequence gaussian_inversion_odds(double sigma);

// mean gap between the ranks a woman gives her worst and best stable
// husbands: (1 + 2 e^{sum k u_k}) * sum k^2 u_k
double rank_gap_bound(const UkSequence& u);

// closed-form envelope of rank_gap_bound for the Gaussian model:
// 4 sqrt(pi) sigma^3 (1 + 2 e^{4 sigma^2})
double gaussian_rank_gap_limit(double sigma);

// mean of the dominating jump process: e^{sum k u_k} * sum k^2 u_k
double jump_mean_bound(const UkSequence& u);

// One run of the dominating process: jumps drawn with
// P[delta < d] = exp(-sum_{k >= d} k u_k), stopped at the first zero.
struct JumpSample {
    std::int64_t total = 0;              // sum of the jumps before the stop
    std::vector<std::int32_t> deltas;    // all draws; last entry is the 0
};

std::int32_t sample_jump_delta(const UkSequence& u, Rng& rng);
JumpSample sample_jump_process(const UkSequence& u, Rng& rng);

// expected stable-husband count: 1 + ln d_w + mean log weight ratio between
// her best and worst stable husbands
double husband_count_bound(std::int32_t d_w, double ln_ratio_mean);

// total stable pairs in an N x N market: N (1 + ln N)
double stable_pairs_bound(std::int32_t n);

// exact expected stable-husband count of the weighted woman in the cyclic
// instance: sum_{j=1..N} (1 - lambda) / (1 - lambda^j), stable near lambda = 1
double cyclic_expected_husbands(std::int32_t n, double lambda);

// natural log of the worst-case popularity ratio between one woman's stable
// husbands: (5 ln N + ln Q_W) * (1 + 4 ln N (1 + log2 N) / ln(1 + 1/R_M));
// holds with probability >= 1 - 2/N^2
double popularity_ratio_log_bound(std::int32_t n, double r_men, double q_women);

// per-woman husband-count growth rate c * (ln Q_W / ln(1 + 1/R_M)) * ln^3 N;
// the constant c is caller-supplied (asymptotic statement, default 1)
double husband_polylog_bound(std::int32_t n, double r_men, double q_women, double c = 1.0);

// total stable pairs with per-woman weights: min(M, W) + sum ln d_w + sum ln r_m,
// where r_m bounds how much man m's weight varies across women
double intrinsic_pairs_bound(std::int32_t num_men, std::int32_t num_women,
                             const std::vector<double>& ln_d_women,
                             const std::vector<double>& ln_r_men);

// total stable pairs with near-symmetric weights (r bounds the asymmetry):
// min(M, W)(1 + ln r) + sum ln d_w / 2 + sum ln d_m / 2
double symmetric_pairs_bound(std::int32_t num_men, std::int32_t num_women, double r,
                             const std::vector<double>& ln_d_women,
                             const std::vector<double>& ln_d_men);

// expected number of accepted proposals among a fixed candidate stream, from
// log-weights: ln |L| + (max_m ln D(m) - ln D(first)); the first candidate is
// the initial partner and must be included in the list
double proposal_log_bound(const std::vector<double>& candidate_log_weights,
                          double initial_log_weight);

// p_new / (p_new + p_prior_sum) evaluated from logs without overflow
double acceptance_probability(double log_p_new, double log_p_prior_sum);

}  // namespace marketsim
