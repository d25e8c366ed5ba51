#include "divmkt/analytic_bounds.hpp"

#include "divmkt/errors.hpp"
#include "divmkt/market_events.hpp"
#include "divmkt/parallel.hpp"
#include "divmkt/path_engine.hpp"
#include "divmkt/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace divmkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a < b) {
        std::swap(a, b);
    }
    if (b == -kInf) {
        return a;
    }
    return a + std::log1p(std::exp(b - a));
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw ContractViolation(what);
    }
}

} // namespace

double lemma_bound(double mu1_0, double delta, double sigma_bar, double lambda) {
    require(mu1_0 > 0.0 && mu1_0 < 1.0, "lemma_bound: top weight must lie in (0, 1)");
    require(delta > 0.0 && delta < 0.5, "lemma_bound: delta must lie in (0, 1/2)");
    require(sigma_bar > 0.0, "lemma_bound: sigma_bar must be positive");
    require(lambda >= 0.0, "lemma_bound: lambda must be nonnegative");
    const double base = std::max(mu1_0, 0.5) / (1.0 - delta);
    return 2.0 * std::exp(std::sqrt(lambda) / sigma_bar * std::log(base));
}

double rbm_start(double mu1_0) { return std::max(std::log(mu1_0) - std::log(0.5), 0.0); }

double rbm_barrier(double delta) { return std::log1p(-delta) - std::log(0.5); }

double rbm_hit_before_exp(double x_tilde, double y_tilde, double lambda, double sigma_bar) {
    require(x_tilde >= 0.0 && x_tilde <= y_tilde, "rbm_hit_before_exp: needs 0 <= x <= y");
    require(lambda > 0.0 && sigma_bar > 0.0, "rbm_hit_before_exp: lambda and sigma_bar must be positive");
    const double k = std::sqrt(lambda) / sigma_bar;
    const double a = x_tilde * k;
    const double b = y_tilde * k;
    // cosh(a) / cosh(b) = e^(a - b) (1 + e^-2a) / (1 + e^-2b)
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

double double_jump_exponent(double delta, double delta0, double sigma) {
    require(delta > 0.0 && delta < delta0 && delta0 < 1.0, "p_N: needs 0 < delta < delta0 < 1");
    require(sigma > 0.0, "p_N: sigma must be positive");
    return (std::log1p(-delta) - std::log(std::max(1.0 - delta0, 0.5))) / sigma;
}

double p_n(double delta, double delta0, double sigma, double lambda_n) {
    require(delta > 0.0 && delta < delta0 && delta0 < 1.0, "p_N: needs 0 < delta < delta0 < 1");
    require(sigma > 0.0 && lambda_n >= 0.0, "p_N: needs sigma > 0 and lambda >= 0");
    const double ratio = std::max(1.0 - delta0, 0.5) / (1.0 - delta);
    return 2.0 * std::pow(ratio, std::sqrt(lambda_n) / sigma);
}

double p_n_exponential(double delta, double delta0, double sigma, double lambda_n) {
    require(lambda_n >= 0.0, "p_N: lambda must be nonnegative");
    return 2.0 * std::exp(-double_jump_exponent(delta, delta0, sigma) * std::sqrt(lambda_n));
}

double large_deviation_rate(double s) {
    require(s > 0.0 && std::isfinite(s), "H(s) needs s > 0");
    return s - 1.0 - std::log(s);
}

double ExplosionTerms::many_jumps() const { return std::exp(log_many_jumps); }
double ExplosionTerms::double_jumps() const { return std::exp(log_double_jumps); }
double ExplosionTerms::log_total() const { return log_add(log_many_jumps, log_double_jumps); }

ExplosionTerms explosion_bound_terms(int L, double u, double horizon, double c, double alpha, double delta,
                                     double delta0, double sigma) {
    require(L >= 2, "explosion_bound_terms: needs L >= 2");
    require(horizon > 0.0, "explosion_bound_terms: horizon must be positive");
    double lambda_max = 0.0;
    for (int n = 3; n <= 2 * L - 1; ++n) {
        lambda_max = std::max(lambda_max, clock_rate(n, c, alpha));
    }
    double lambda_min = kInf;
    for (int n = L + 1; n <= 2 * L - 1; ++n) {
        lambda_min = std::min(lambda_min, clock_rate(n, c, alpha));
    }
    require(u > L && u > horizon * lambda_max, "explosion_bound_terms: needs u > L v T lambda_max");

    ExplosionTerms out;
    out.log_many_jumps = -u * large_deviation_rate(horizon * lambda_max / u);
    const double a1 = double_jump_exponent(delta, delta0, sigma);
    out.log_double_jumps = L * std::log(3.0 * u) - std::lgamma(L + 1.0) + (L - 1) * std::log(2.0) -
                           a1 * (L - 1) * std::sqrt(lambda_min);
    return out;
}

Proportion estimate_split_before_clock(const ModelParams& params, const MarketState& initial, double lambda,
                                       std::size_t paths, std::uint64_t seed, int workers, double time_cap) {
    require(paths > 0, "estimate_split_before_clock: needs at least one path");
    require(lambda >= 0.0, "estimate_split_before_clock: lambda must be nonnegative");
    initial.validate();
    const auto hits = run_indexed(paths, workers, [&](std::size_t p) -> char {
        PathStream stream(seed, p);
        MergerClock clock{stream.exponential(lambda)};
        const auto outcome = run_until_event(initial, params, clock, stream, initial.t + time_cap);
        return outcome.event && outcome.event->kind == EventKind::Split ? 1 : 0;
    });
    return proportion(static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1)), paths);
}

MarketState threshold_state(int n, const ModelParams& params, std::uint64_t seed, std::uint64_t path) {
    require(n >= 3, "threshold_state: needs N >= 3");
    PathStream stream(derive_seed(seed, "threshold-state"), path);
    const int others = n - 2;
    std::vector<double> shares(static_cast<std::size_t>(others));
    double sum = 0.0;
    for (double& s : shares) {
        s = stream.exponential(1.0);
        sum += s;
    }
    std::vector<double> caps;
    caps.reserve(static_cast<std::size_t>(n - 1));
    caps.push_back(1.0 - params.delta);
    for (double s : shares) {
        caps.push_back(params.delta * s / sum);
    }
    MarketState state = MarketState::from_caps(std::move(caps));
    while (!detect_split(state, params)) {
        state.caps[0] = std::nextafter(state.caps[0], kInf);
    }
    return state;
}

DoubleJumpEstimate estimate_double_jump(const ModelParams& params, int n, std::size_t paths, std::uint64_t seed,
                                        int workers, double time_cap) {
    require(paths > 0, "estimate_double_jump: needs at least one path");
    require(n >= 3 && n <= params.n_max, "estimate_double_jump: needs 3 <= N <= n_max");
    // 0: next event is not a split, 1: it is, 2: no event before the cap.
    const auto outcomes = run_indexed(paths, workers, [&](std::size_t p) -> char {
        PathStream stream(seed, p);
        MergerClock clock = MergerClock::draw(n - 1, params, stream);
        const auto entry = run_until_event(threshold_state(n, params, seed, p), params, clock, stream, time_cap);
        if (!entry.event || entry.event->kind != EventKind::Split || entry.state.size() != n) {
            throw ContractViolation("double-jump segment did not start with an upward jump");
        }
        const auto next = run_until_event(entry.state, params, clock, stream, entry.state.t + time_cap);
        if (!next.event) {
            return 2;
        }
        return next.event->kind == EventKind::Split ? 1 : 0;
    });
    DoubleJumpEstimate out;
    out.segments = paths;
    out.undecided = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), 2));
    out.frequency = proportion(static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), 1)), paths);
    return out;
}

TailEstimate tail_from_counts(std::span<const int> max_counts, std::span<const double> u_grid, int n_max) {
    require(!max_counts.empty(), "tail estimate needs at least one path");
    require(std::is_sorted(u_grid.begin(), u_grid.end()) &&
                std::adjacent_find(u_grid.begin(), u_grid.end()) == u_grid.end(),
            "u-grid must be strictly increasing");
    TailEstimate out;
    out.guard_fired = static_cast<std::size_t>(
        std::count_if(max_counts.begin(), max_counts.end(), [n_max](int m) { return m > n_max; }));
    for (double u : u_grid) {
        require(u > 0.0, "u-grid entries must be positive");
        const auto hits = static_cast<std::size_t>(
            std::count_if(max_counts.begin(), max_counts.end(), [u](int m) { return m > u; }));
        TailPoint pt;
        pt.u = u;
        pt.tail = proportion(hits, max_counts.size());
        pt.rate = hits == 0 ? kInf : -std::log(pt.tail.estimate) / u;
        pt.rate_ci.lo = pt.tail.ci.hi >= 1.0 ? 0.0 : -std::log(pt.tail.ci.hi) / u;
        pt.rate_ci.hi = pt.tail.ci.lo <= 0.0 ? kInf : -std::log(pt.tail.ci.lo) / u;
        out.points.push_back(pt);
    }
    return out;
}

TailEstimate tail_of_max_count(const ModelParams& params, const MarketState& initial, double horizon,
                               std::span<const double> u_grid, std::size_t paths, std::uint64_t seed,
                               int workers) {
    require(paths > 0, "tail_of_max_count: needs at least one path");
    PathOptions options;
    options.horizon = horizon;
    const RuleSet none;
    const auto results = simulate_paths(params, initial, none, options, seed, paths, workers);
    std::vector<int> counts;
    counts.reserve(results.size());
    std::size_t failed = 0;
    for (const auto& r : results) {
        if (r.status == PathStatus::Overflow || r.status == PathStatus::NonPositiveWealth) {
            ++failed;
            continue;
        }
        counts.push_back(r.max_count);
    }
    TailEstimate out = tail_from_counts(counts, u_grid, params.n_max);
    out.failed_paths = failed;
    return out;
}

bool tail_rate_nondecreasing(const TailEstimate& estimate, std::size_t* compared) {
    std::size_t pairs = 0;
    bool ok = true;
    const auto& pts = estimate.points;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const Interval& lo = pts[a].rate_ci;
            const Interval& hi = pts[b].rate_ci;
            const bool disjoint = lo.hi < hi.lo || hi.hi < lo.lo;
            if (!disjoint) {
                continue;
            }
            ++pairs;
            ok = ok && lo.hi < hi.lo;
        }
    }
    if (compared) {
        *compared = pairs;
    }
    return ok;
}

} // namespace divmkt
