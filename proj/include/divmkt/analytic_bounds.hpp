#pragma once

#include "divmkt/params.hpp"
#include "divmkt/sde_core.hpp"
#include "divmkt/stats.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace divmkt {

/// Upper bound 2 ((mu1 v 1/2) / (1 - delta))^(sqrt(lambda) / sigma_bar) on
/// the probability that the top weight reaches 1 - delta before an
/// independent exponential time of rate lambda.
double lemma_bound(double mu1_0, double delta, double sigma_bar, double lambda);

/// (log mu1 - log 1/2)^+, the starting point of the reflected comparison process.
double rbm_start(double mu1_0);
/// log(1 - delta) - log 1/2, the barrier of the reflected comparison process.
double rbm_barrier(double delta);

/// cosh(x sqrt(lambda) / sigma_bar) / cosh(y sqrt(lambda) / sigma_bar): the
/// probability that |B| with variance rate 2 sigma_bar^2, started at x,
/// reaches y before an exponential time of rate lambda.
double rbm_hit_before_exp(double x_tilde, double y_tilde, double lambda, double sigma_bar);

/// (log(1 - delta) - log((1 - delta0) v 1/2)) / sigma.
double double_jump_exponent(double delta, double delta0, double sigma);

/// Double-jump bound as a power of the weight ratio.
double p_n(double delta, double delta0, double sigma, double lambda_n);
/// The same bound written as 2 exp(-alpha_1 sqrt(lambda_n)).
double p_n_exponential(double delta, double delta0, double sigma, double lambda_n);

/// H(s) = s - 1 - log s on s > 0.
double large_deviation_rate(double s);

/// Log-space values of the two terms bounding P(Theta_2L <= T).
struct ExplosionTerms {
    /// log of exp(-u H(T lambda_max / u)), lambda_max = max lambda_3..lambda_{2L-1}.
    double log_many_jumps = 0.0;
    /// log of (3u)^L / L! 2^(L-1) exp(-alpha_1 (L-1) sqrt(lambda_min)),
    /// lambda_min = min lambda_{L+1}..lambda_{2L-1}.
    double log_double_jumps = 0.0;

    double many_jumps() const;
    double double_jumps() const;
    /// log of the sum, computed without leaving log space.
    double log_total() const;
};

ExplosionTerms explosion_bound_terms(int L, double u, double horizon, double c, double alpha, double delta,
                                     double delta0, double sigma);

/// Frequency of the top weight reaching 1 - delta before an independent
/// exponential time of rate lambda. No other event interrupts the path; a
/// path that sees neither by `time_cap` counts as a miss.
Proportion estimate_split_before_clock(const ModelParams& params, const MarketState& initial, double lambda,
                                       std::size_t paths, std::uint64_t seed, int workers = 1,
                                       double time_cap = 1e3);

/// Starting state for one double-jump segment: N - 1 companies, the first
/// at weight 1 - delta (nudged up by ulps until detection fires), the others
/// sharing delta with random proportions.
MarketState threshold_state(int n, const ModelParams& params, std::uint64_t seed, std::uint64_t path);

struct DoubleJumpEstimate {
    Proportion frequency;       ///< P(next event is a split | upward jump to level N)
    std::size_t segments = 0;   ///< segments harvested
    std::size_t undecided = 0;  ///< segments with no event before the time cap
};

/// Harvests segments that begin right after an upward jump from N - 1 to N
/// and records whether the next event is again a split.
DoubleJumpEstimate estimate_double_jump(const ModelParams& params, int n, std::size_t paths, std::uint64_t seed,
                                        int workers = 1, double time_cap = 1e3);

struct TailPoint {
    double u = 0.0;
    Proportion tail;            ///< P(max N(t) > u)
    double rate = 0.0;          ///< -log(tail) / u; +inf when no path exceeds u
    Interval rate_ci;           ///< image of the Wilson interval under -log(.) / u
};

struct TailEstimate {
    std::vector<TailPoint> points;
    std::size_t guard_fired = 0;
    std::size_t failed_paths = 0;
};

/// Tail of the maximal company count from per-path maxima (n_max + 1 for
/// paths stopped by the explosion guard).
TailEstimate tail_from_counts(std::span<const int> max_counts, std::span<const double> u_grid, int n_max);

TailEstimate tail_of_max_count(const ModelParams& params, const MarketState& initial, double horizon,
                               std::span<const double> u_grid, std::size_t paths, std::uint64_t seed,
                               int workers = 1);

/// Whether -log p(u) / u is nondecreasing across every pair of grid points
/// whose rate intervals are disjoint. `compared` receives the pair count.
bool tail_rate_nondecreasing(const TailEstimate& estimate, std::size_t* compared = nullptr);

} // namespace divmkt
