#include "marketsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace marketsim {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

UkSequence UkSequence::from_values(std::vector<double> values) {
    for (double v : values) require(v >= 0.0 && std::isfinite(v), "u_k must be finite and >= 0");
    UkSequence u;
    u.values_ = std::move(values);
    return u;
}

UkSequence UkSequence::geometric(double a, double rho) {
    require(a >= 0.0 && std::isfinite(a), "scale must be finite and >= 0");
    require(rho >= 0.0 && rho < 1.0, "ratio must lie in [0, 1)");
    UkSequence u;
    u.geometric_ = true;
    u.a_ = a;
    u.rho_ = rho;
    return u;
}

double UkSequence::at(std::int32_t k) const {
    require(k >= 1, "u_k is indexed from 1");
    if (geometric_) return a_ * std::pow(rho_, static_cast<double>(k));
    if (static_cast<std::size_t>(k) > values_.size()) return 0.0;
    return values_[static_cast<std::size_t>(k - 1)];
}

double UkSequence::weighted_sum() const {
    if (geometric_) {
        // sum k rho^k = rho / (1 - rho)^2
        const double d = 1.0 - rho_;
        return a_ * rho_ / (d * d);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        sum += static_cast<double>(i + 1) * values_[i];
    return sum;
}

double UkSequence::weighted_sq_sum() const {
    if (geometric_) {
        // sum k^2 rho^k = rho (1 + rho) / (1 - rho)^3
        const double d = 1.0 - rho_;
        return a_ * rho_ * (1.0 + rho_) / (d * d * d);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        sum += static_cast<double>(i + 1) * static_cast<double>(i + 1) * values_[i];
    return sum;
}

double UkSequence::tail_weighted_sum(std::int32_t delta) const {
    const std::int32_t start = std::max(delta, 1);
    if (geometric_) {
        // sum_{k >= d} k rho^k = rho^d (d (1 - rho) + rho) / (1 - rho)^2
        const double d = 1.0 - rho_;
        return a_ * std::pow(rho_, static_cast<double>(start)) *
               (static_cast<double>(start) * d + rho_) / (d * d);
    }
    double sum = 0.0;
    for (std::size_t i = static_cast<std::size_t>(start - 1); i < values_.size(); ++i)
        sum += static_cast<double>(i + 1) * values_[i];
    return sum;
}

UkSequence UkSequence::truncated(std::int32_t kmax) const {
    require(kmax >= 1, "cut point must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(kmax));
    for (std::int32_t k = 1; k <= kmax; ++k) values[static_cast<std::size_t>(k - 1)] = at(k);
    if (geometric_ && rho_ > 0.0) {
        // fold the dropped tail into the last entry so that weighted_sum only
        // grows: sum_{k > kmax} k u_k <= a rho^{kmax+1} (kmax+2) / (1-rho)^2
        const double d = 1.0 - rho_;
        const double slack = a_ * std::pow(rho_, static_cast<double>(kmax + 1)) *
                             static_cast<double>(kmax + 2) / (d * d);
        values.back() += slack / static_cast<double>(kmax);
    }
    return from_values(std::move(values));
}

UkSequence gaussian_inversion_odds(double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    // exp(-(k/2sigma)^2) underflows past (k/2sigma)^2 > 745
    const std::int32_t kmax =
        std::max<std::int32_t>(4, static_cast<std::int32_t>(std::ceil(2.0 * sigma * 27.3)) + 1);
    std::vector<double> values(static_cast<std::size_t>(kmax));
    for (std::int32_t k = 1; k <= kmax; ++k) {
        const double z = static_cast<double>(k) / (2.0 * sigma);
        values[static_cast<std::size_t>(k - 1)] = 2.0 * std::exp(-z * z);
    }
    return UkSequence::from_values(std::move(values));
}

double rank_gap_bound(const UkSequence& u) {
    return (1.0 + 2.0 * std::exp(u.weighted_sum())) * u.weighted_sq_sum();
}

double gaussian_rank_gap_limit(double sigma) {
    require(sigma > 0.0, "sigma must be positive");
    return 4.0 * std::sqrt(std::numbers::pi) * sigma * sigma * sigma *
           (1.0 + 2.0 * std::exp(4.0 * sigma * sigma));
}

double jump_mean_bound(const UkSequence& u) {
    return std::exp(u.weighted_sum()) * u.weighted_sq_sum();
}

std::int32_t sample_jump_delta(const UkSequence& u, Rng& rng) {
    const double v = rng.uniform01();
    for (std::int32_t d = 0;; ++d) {
        // P[delta <= d] = exp(-sum_{k >= d+1} k u_k)
        const double cdf = std::exp(-u.tail_weighted_sum(d + 1));
        if (cdf >= v || cdf > 1.0 - 1e-12) return d;
    }
}

JumpSample sample_jump_process(const UkSequence& u, Rng& rng) {
    JumpSample sample;
    for (;;) {
        const std::int32_t delta = sample_jump_delta(u, rng);
        sample.deltas.push_back(delta);
        if (delta == 0) break;
        sample.total += delta;
    }
    return sample;
}

double husband_count_bound(std::int32_t d_w, double ln_ratio_mean) {
    require(d_w >= 1, "list length must be >= 1");
    return 1.0 + std::log(static_cast<double>(d_w)) + ln_ratio_mean;
}

double stable_pairs_bound(std::int32_t n) {
    require(n >= 1, "market size must be >= 1");
    return static_cast<double>(n) * (1.0 + std::log(static_cast<double>(n)));
}

double cyclic_expected_husbands(std::int32_t n, double lambda) {
    require(n >= 1, "market size must be >= 1");
    require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    const double log_lambda = std::log(lambda);
    double sum = 0.0;
    for (std::int32_t j = 1; j <= n; ++j) {
        // 1 - lambda^j = -expm1(j log lambda), exact even for lambda near 1
        sum += -std::expm1(log_lambda) / -std::expm1(static_cast<double>(j) * log_lambda);
    }
    return sum;
}

double popularity_ratio_log_bound(std::int32_t n, double r_men, double q_women) {
    require(n >= 2, "market size must be >= 2");
    require(r_men >= 1.0, "men-side spread must be >= 1");
    require(q_women >= 1.0, "women-side spread must be >= 1");
    const double ln_n = std::log(static_cast<double>(n));
    const double exponent =
        1.0 + 4.0 * ln_n * (1.0 + std::log2(static_cast<double>(n))) / std::log1p(1.0 / r_men);
    return (5.0 * ln_n + std::log(q_women)) * exponent;
}

double husband_polylog_bound(std::int32_t n, double r_men, double q_women, double c) {
    require(n >= 2, "market size must be >= 2");
    require(r_men >= 1.0, "men-side spread must be >= 1");
    require(q_women >= 1.0, "women-side spread must be >= 1");
    const double ln_n = std::log(static_cast<double>(n));
    return c * (std::log(q_women) / std::log1p(1.0 / r_men)) * ln_n * ln_n * ln_n;
}

double intrinsic_pairs_bound(std::int32_t num_men, std::int32_t num_women,
                             const std::vector<double>& ln_d_women,
                             const std::vector<double>& ln_r_men) {
    require(num_men >= 1 && num_women >= 1, "market sides must be positive");
    double sum = static_cast<double>(std::min(num_men, num_women));
    for (double v : ln_d_women) sum += v;
    for (double v : ln_r_men) sum += v;
    return sum;
}

double symmetric_pairs_bound(std::int32_t num_men, std::int32_t num_women, double r,
                             const std::vector<double>& ln_d_women,
                             const std::vector<double>& ln_d_men) {
    require(num_men >= 1 && num_women >= 1, "market sides must be positive");
    require(r >= 1.0, "asymmetry factor must be >= 1");
    double sum = static_cast<double>(std::min(num_men, num_women)) * (1.0 + std::log(r));
    for (double v : ln_d_women) sum += v / 2.0;
    for (double v : ln_d_men) sum += v / 2.0;
    return sum;
}

double proposal_log_bound(const std::vector<double>& candidate_log_weights,
                          double initial_log_weight) {
    require(!candidate_log_weights.empty(), "candidate list must be nonempty");
    const double max_log =
        *std::max_element(candidate_log_weights.begin(), candidate_log_weights.end());
    require(max_log >= initial_log_weight, "initial partner must be among the candidates");
    return std::log(static_cast<double>(candidate_log_weights.size())) +
           (max_log - initial_log_weight);
}

double acceptance_probability(double log_p_new, double log_p_prior_sum) {
    require(std::isfinite(log_p_new) && std::isfinite(log_p_prior_sum),
            "weights must be positive and finite");
    // p/(p+s) = 1/(1 + exp(ls - lp))
    return 1.0 / (1.0 + std::exp(log_p_prior_sum - log_p_new));
}

}  // namespace marketsim
