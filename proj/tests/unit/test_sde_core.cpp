#include "doctest.h"

#include "divmkt/errors.hpp"
#include "divmkt/random.hpp"
#include "divmkt/sde_core.hpp"

#include <cmath>
#include <vector>

using namespace divmkt;

namespace {

using Order = std::vector<std::size_t>;

/// N = 2 and N = 3 rows set by hand; larger N unused.
ModelParams two_rank_model() {
    ModelParams p = make_linear_model(4, {0.0, 0.0}, {1.0, 0.0});
    p.drift.at(2, 1) = -1.0;
    p.drift.at(2, 2) = 1.0;
    return p;
}

std::vector<double> random_caps(PathStream& s, int n) {
    std::vector<double> caps(static_cast<std::size_t>(n));
    for (double& c : caps) {
        c = std::exp(2.0 * s.normal());
    }
    return caps;
}

} // namespace

TEST_CASE("rank breaks ties toward the lower index") {
    CHECK(rank(MarketState::from_caps({3, 5, 5, 1})).rank_to_index == Order{1, 2, 0, 3});
    CHECK(rank(MarketState::from_caps({7, 7})).rank_to_index == Order{0, 1});
    CHECK(rank(MarketState::from_caps({1, 2, 3})).rank_to_index == Order{2, 1, 0});
}

TEST_CASE("invalid states are rejected") {
    CHECK_THROWS_AS(MarketState::from_caps({7}), ContractViolation);
    CHECK_THROWS_AS(MarketState::from_caps({1, 0}), ContractViolation);
    CHECK_THROWS_AS(MarketState::from_caps({1, NAN}), ContractViolation);
    CHECK_THROWS_AS(MarketState::from_caps({1, -2}), ContractViolation);
}

TEST_CASE("market weights") {
    auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
        }
    };
    close(market_weights(MarketState::from_caps({1, 1, 2})), {0.25, 0.25, 0.5});
    close(market_weights(MarketState::from_caps({3.7, 3.7})), {0.5, 0.5});
    close(market_weights(MarketState::from_caps({2, 3, 5})), {0.2, 0.3, 0.5});
}

TEST_CASE("frozen-rank euler step example") {
    const ModelParams p = two_rank_model();
    const MarketState s = MarketState::from_caps({std::exp(1.0), 1.0});
    const MarketState next = euler_step(s, p, std::vector<double>{0.0, 0.0}, 0.1);
    CHECK(next.caps[0] == doctest::Approx(std::exp(0.9)).epsilon(1e-14));
    CHECK(next.caps[1] == doctest::Approx(std::exp(0.1)).epsilon(1e-14));
    CHECK(next.t == doctest::Approx(0.1));
    CHECK(next.size() == 2);
}

TEST_CASE("zero coefficients leave the caps unchanged") {
    ModelParams p = make_linear_model(4, {0.0, 0.0}, {0.0, 0.0});
    const MarketState s = MarketState::from_caps({2.0, 3.0, 4.0});
    const MarketState next = euler_step(s, p, std::vector<double>{0.3, -1.0, 2.0}, 0.01);
    CHECK(next.caps == s.caps);
    CHECK(next.t == doctest::Approx(0.01));
}

TEST_CASE("overflow is a path error") {
    const ModelParams p = make_linear_model(4, {0.0, 0.0}, {1.0, 0.0});
    const MarketState s = MarketState::from_caps({1e300, 1.0});
    CHECK_THROWS_AS(euler_step(s, p, std::vector<double>{1e3, 0.0}, 1.0), PathError);
}

TEST_CASE("excess growth rate examples") {
    const ModelParams p = make_linear_model(4, {0.0, 0.0}, {1.0, 0.0});
    CHECK(excess_growth_rate(MarketState::from_caps({1, 1}), p) == doctest::Approx(0.25));
    CHECK(excess_growth_rate(MarketState::from_caps({0.2, 0.5, 0.3}), p) == doctest::Approx(0.31));
}

TEST_CASE("property: rank idempotent and scale invariant") {
    PathStream s(1, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + trial % 9;
        auto caps = random_caps(s, n);
        if (trial % 3 == 0) {
            caps[1] = caps[0]; // force a tie
        }
        const auto r = rank(MarketState::from_caps(caps)).rank_to_index;
        for (std::size_t q = 1; q < r.size(); ++q) {
            REQUIRE(caps[r[q - 1]] >= caps[r[q]]);
            if (caps[r[q - 1]] == caps[r[q]]) {
                REQUIRE(r[q - 1] < r[q]);
            }
        }
        Order again = r;
        rank_into(caps, again);
        CHECK(again == r);
        std::vector<double> scaled = caps;
        for (double& c : scaled) {
            c *= 4.0; // exact scaling keeps ties
        }
        CHECK(rank(MarketState::from_caps(scaled)).rank_to_index == r);
    }
}

TEST_CASE("property: weights are scale invariant") {
    PathStream s(2, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto caps = random_caps(s, 2 + trial % 7);
        const double c = std::exp(3.0 * s.normal());
        std::vector<double> scaled = caps;
        for (double& x : scaled) {
            x *= c;
        }
        const auto a = market_weights(MarketState::from_caps(caps));
        const auto b = market_weights(MarketState::from_caps(scaled));
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
            CHECK(a[i] > 0.0);
            CHECK(a[i] < 1.0);
            sum += a[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("property: a uniform log shift does not change post-step weights") {
    const ModelParams p = make_linear_model(12, {-0.3, 0.3}, {0.8, 0.4});
    PathStream s(3, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 10;
        const auto caps = random_caps(s, n);
        std::vector<double> noise(static_cast<std::size_t>(n));
        for (double& z : noise) {
            z = s.normal();
        }
        std::vector<double> shifted = caps;
        for (double& x : shifted) {
            x *= std::exp(1.7);
        }
        const auto a = market_weights(euler_step(MarketState::from_caps(caps), p, noise));
        const auto b = market_weights(euler_step(MarketState::from_caps(shifted), p, noise));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: excess growth bounded below on diverse states") {
    const ModelParams p = make_linear_model(12, {-0.3, 0.3}, {0.8, 0.4});
    const double floor = p.sigma_min() * p.sigma_min() * p.delta / 2.0;
    PathStream s(4, 0);
    int tested = 0;
    while (tested < 500) {
        const auto caps = random_caps(s, 2 + tested % 10);
        const auto st = MarketState::from_caps(caps);
        const auto w = market_weights(st);
        if (*std::max_element(w.begin(), w.end()) > 1.0 - p.delta) {
            continue;
        }
        ++tested;
        CHECK(excess_growth_rate(st, p) >= floor - 1e-12);
    }
}

TEST_CASE("total capitalization is compensated") {
    const std::vector<double> caps{1.0, 1e-16, 1e-16, 1e-16, 1e-16};
    CHECK(total_capitalization(caps) == 1.0 + 4e-16);
}
