#include "doctest.h"

#include "divmkt/analytic_bounds.hpp"
#include "divmkt/checks.hpp"
#include "divmkt/errors.hpp"
#include "divmkt/market_events.hpp"

#include <cmath>
#include <vector>

using namespace divmkt;

namespace {

ModelParams model(double c = 1.0) { return make_linear_model(16, {-0.3, 0.3}, {0.8, 0.4}, 0.1, 0.25, c, 2.0, 1e-3); }

} // namespace

TEST_CASE("lemma bound examples") {
    CHECK(lemma_bound(0.5, 0.1, 1.0, 4.0) == doctest::Approx(0.6172839506172839).epsilon(1e-14));
    CHECK(lemma_bound(0.3, 0.1, 1.0, 4.0) == lemma_bound(0.5, 0.1, 1.0, 4.0));
    CHECK(lemma_bound(0.7, 0.1, 1.3, 0.0) == 2.0);
    CHECK(lemma_bound(0.9 - 1e-12, 0.1, 1.0, 100.0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("property: lemma bound and p_N decrease in lambda") {
    for (double sigma : {0.5, 1.0, 2.5}) {
        double prev_l = INFINITY;
        double prev_p = INFINITY;
        for (double lambda = 0.0; lambda <= 1e4; lambda = lambda * 2 + 1) {
            const double l = lemma_bound(0.6, 0.1, sigma, lambda);
            const double p = p_n(0.1, 0.325, sigma, lambda);
            CHECK(l <= prev_l);
            CHECK(p <= prev_p);
            prev_l = l;
            prev_p = p;
        }
        CHECK(lemma_bound(0.6, 0.1, sigma, 1e8) >= 0.0);
        CHECK(std::isfinite(p_n(0.1, 0.325, sigma, 1e8)));
    }
}

TEST_CASE("reflected BM hitting probability") {
    const double y = rbm_barrier(0.1);
    CHECK(y == doctest::Approx(0.5877866649021191));
    CHECK(rbm_hit_before_exp(0.2, y, 4.0, 1.0) == doctest::Approx(0.6092879357007712).epsilon(1e-14));
    CHECK(rbm_hit_before_exp(0.0, y, 4.0, 1.0) == doctest::Approx(0.5635958808794879).epsilon(1e-14));
    CHECK(rbm_hit_before_exp(0.0, y, 4.0, 1.0) == doctest::Approx(1.0 / std::cosh(2.0 * y)).epsilon(1e-14));
    CHECK(rbm_hit_before_exp(y, y, 4.0, 1.0) == 1.0);
    CHECK_THROWS_AS(rbm_hit_before_exp(0.7, y, 4.0, 1.0), ContractViolation);
    // cosh overflows at these arguments; the ratio does not.
    const double tiny = rbm_hit_before_exp(0.2, y, 1e8, 1.0);
    CHECK(tiny >= 0.0);
    CHECK(tiny < 1e-300);
    CHECK(rbm_start(0.4) == 0.0);
    CHECK(rbm_start(0.5 * std::exp(0.2)) == doctest::Approx(0.2));
}

TEST_CASE("property: reflected BM probability lies in (0, 1]") {
    for (double x = 0.0; x <= 0.58; x += 0.05) {
        for (double lambda : {0.1, 1.0, 10.0, 100.0}) {
            const double p = rbm_hit_before_exp(x, 0.58, lambda, 1.0);
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
}

TEST_CASE("p_N examples and the two closed forms") {
    CHECK(p_n(0.1, 0.2, 1.0, 1.0) == doctest::Approx(1.7777777777777777).epsilon(1e-14));
    CHECK(p_n(0.1, 0.2, 1.0, 0.0) == 2.0);
    for (double delta : {0.01, 0.1, 0.16}) {
        for (double delta0 : {0.2, 0.4, 0.7}) {
            for (double lambda : {0.5, 9.0, 1e3, 1e6}) {
                const double a = p_n(delta, delta0, 1.1, lambda);
                const double b = p_n_exponential(delta, delta0, 1.1, lambda);
                CHECK(std::abs(a - b) <= 1e-12 * a);
            }
        }
    }
    CHECK_THROWS_AS(p_n(0.3, 0.2, 1.0, 1.0), ContractViolation);
}

TEST_CASE("H function") {
    CHECK(large_deviation_rate(1.0) == 0.0);
    CHECK(large_deviation_rate(0.5) == doctest::Approx(0.1931471805599453));
    CHECK(large_deviation_rate(3.0) == doctest::Approx(0.9013877113318903));
    CHECK_THROWS_AS(large_deviation_rate(0.0), ContractViolation);
    CHECK_THROWS_AS(large_deviation_rate(-1.0), ContractViolation);
    // H(s) >= -log(s) / 2 below s0 = 0.1.
    for (double s = 1e-6; s < 0.1; s *= 1.5) {
        CHECK(large_deviation_rate(s) >= -0.5 * std::log(s));
    }
}

TEST_CASE("explosion bound terms") {
    const double delta = 0.1;
    const double delta0 = 1.0 - 0.9 * 0.75;
    const double expected_many[] = {-3798.7732064925613, -13887.053913709393, -53041.727406060048};
    const double expected_double[] = {19.170664905427259, -97.746301084112513, -772.2422567920462};
    double prev = INFINITY;
    int idx = 0;
    for (int L : {10, 20, 40}) {
        const double u = 100.0 * L * L;
        const ExplosionTerms t = explosion_bound_terms(L, u, 1.0, 10.0, 2.0, delta, delta0, 1.2);
        CHECK(t.log_many_jumps == doctest::Approx(expected_many[idx]).epsilon(1e-12));
        CHECK(t.log_double_jumps == doctest::Approx(expected_double[idx]).epsilon(1e-12));
        CHECK(t.log_total() < prev);
        CHECK(std::isfinite(t.log_total()));
        prev = t.log_total();
        ++idx;
    }
    CHECK_THROWS_AS(explosion_bound_terms(10, 5.0, 1.0, 10.0, 2.0, delta, delta0, 1.2), ContractViolation);
    CHECK_THROWS_AS(explosion_bound_terms(10, 200.0, 1.0, 10.0, 2.0, delta, delta0, 1.2), ContractViolation);
}

TEST_CASE("split before clock: zero rate and a recurrent start") {
    const ModelParams p = model();
    const MarketState start = MarketState::from_caps({0.9, 0.05, 0.05});
    const Proportion est = estimate_split_before_clock(p, start, 0.0, 200, 1);
    CHECK(est.estimate == 1.0);
    CHECK(lemma_bound(0.9 - 1e-12, p.delta, p.sigma_max(5), 0.0) == 2.0);
}

TEST_CASE("split before clock stays under the lemma bound for N = 5") {
    const ModelParams p = model();
    const MarketState start = MarketState::from_caps({0.7, 0.075, 0.075, 0.075, 0.075});
    for (double lambda : {4.0, 16.0}) {
        const Proportion est = estimate_split_before_clock(p, start, lambda, 4000, 2);
        CHECK(est.estimate <= lemma_bound(0.7, p.delta, p.sigma_max(5), lambda) + 3.0 * est.std_error);
    }
}

TEST_CASE("split before clock rises with delta") {
    const MarketState start = MarketState::from_caps({0.7, 0.075, 0.075, 0.075, 0.075});
    double prev = -1.0;
    for (double delta : {0.05, 0.10, 0.15}) {
        ModelParams p = model();
        p.delta = delta;
        const Proportion est = estimate_split_before_clock(p, start, 4.0, 4000, 3);
        CHECK(est.estimate > prev);
        prev = est.estimate;
    }
}

TEST_CASE("threshold state forces a split up to level N") {
    const ModelParams p = model();
    for (std::uint64_t path = 0; path < 50; ++path) {
        const MarketState st = threshold_state(5, p, 1, path);
        CHECK(st.size() == 4);
        REQUIRE(detect_split(st, p));
        CHECK(*detect_split(st, p) == 0);
    }
}

TEST_CASE("double jump estimator limits") {
    SUBCASE("no clock: the next event is always a split") {
        const auto est = estimate_double_jump(model(0.0), 4, 100, 1, 1, 5.0);
        CHECK(est.frequency.estimate + static_cast<double>(est.undecided) / est.segments == doctest::Approx(1.0));
        CHECK(p_n(0.1, model().delta0(), model().sigma_max(), 0.0) == 2.0);
    }
    SUBCASE("huge clock: the next event is a merger") {
        const auto est = estimate_double_jump(model(1e5), 4, 500, 2);
        CHECK(est.frequency.estimate == 0.0);
    }
    SUBCASE("generic N = 4 stays under p_4") {
        ModelParams p = model();
        p.clock_c = clock_constant_for_p3(p, 0.4);
        const auto est = estimate_double_jump(p, 4, 2000, 3);
        const double bound = p_n(p.delta, p.delta0(), p.sigma_max(), clock_rate(4, p));
        CHECK(bound < 0.5);
        CHECK(est.frequency.estimate <= bound + 3.0 * est.frequency.std_error);
    }
}

TEST_CASE("tail from counts") {
    const std::vector<int> counts{3, 3, 4, 5, 3, 4, 3, 3, 6, 3};
    const std::vector<double> grid{2, 3, 4, 5, 10};
    const TailEstimate est = tail_from_counts(counts, grid, 5);
    CHECK(est.points[0].tail.estimate == 1.0);
    CHECK(est.points[1].tail.estimate == doctest::Approx(0.4));
    CHECK(est.points[2].tail.estimate == doctest::Approx(0.2));
    CHECK(est.points[3].tail.estimate == doctest::Approx(0.1));
    CHECK(est.points[3].tail.estimate == static_cast<double>(est.guard_fired) / counts.size());
    CHECK(std::isinf(est.points[4].rate));
    CHECK(est.points[1].rate == doctest::Approx(-std::log(0.4) / 3.0));
    const std::vector<double> unsorted{3, 2};
    CHECK_THROWS_AS(tail_from_counts(counts, unsorted, 5), ContractViolation);
}

TEST_CASE("tail monotonicity compares only separated points") {
    TailEstimate est;
    TailPoint a;
    a.rate_ci = {0.1, 0.2};
    TailPoint b;
    b.rate_ci = {0.15, 0.3};
    TailPoint c;
    c.rate_ci = {0.5, 0.6};
    est.points = {a, b, c};
    std::size_t compared = 0;
    CHECK(tail_rate_nondecreasing(est, &compared));
    CHECK(compared == 2);
    est.points = {c, a};
    CHECK_FALSE(tail_rate_nondecreasing(est, &compared));
    CHECK(compared == 1);
}

TEST_CASE("tail of the max count on a small run") {
    const ModelParams p = model();
    const std::vector<double> grid{2, 3, 4};
    const TailEstimate est = tail_of_max_count(p, MarketState::from_caps({8, 1, 1}), 1.0, grid, 2000, 4);
    CHECK(est.points[0].tail.estimate == 1.0);
    CHECK(est.guard_fired == 0);
    CHECK(est.points[1].tail.estimate >= est.points[2].tail.estimate);
}

TEST_CASE("clock constant tuned for p_3") {
    ModelParams p = model();
    p.clock_c = clock_constant_for_p3(p, 0.4);
    CHECK(p_n(p.delta, p.delta0(), p.sigma_max(), clock_rate(3, p)) == doctest::Approx(0.4).epsilon(1e-12));
}
