#include "doctest.h"

#include "divmkt/config.hpp"
#include "divmkt/errors.hpp"
#include "divmkt/params.hpp"

#include <algorithm>
#include <string>

using namespace divmkt;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

const char* kMinimal = R"(
[model]
delta = 0.1
eps0 = 0.25
dt = 0.001
n_max = 8
drift = linear
drift_intercept = -0.2
drift_slope = 0.2
vol = linear
vol_intercept = 1
vol_slope = 0

[initial]
n = 3
)";

std::vector<std::string> config_errors(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("rank table layout and lookups") {
    RankTable t(5);
    for (int n = 2; n <= 5; ++n) {
        for (int k = 1; k <= n; ++k) {
            t.at(n, k) = 10 * n + k;
        }
    }
    CHECK(t(2, 1) == 21);
    CHECK(t(5, 5) == 55);
    CHECK(t.row(4).size() == 4);
    CHECK(t.row(4)[2] == 43);
    CHECK(t.min() == 21);
    CHECK(t.max() == 55);
    CHECK_THROWS_AS(t(6, 1), ContractViolation);
    CHECK_THROWS_AS(t(3, 4), ContractViolation);
    CHECK_THROWS_AS(t(1, 1), ContractViolation);
}

TEST_CASE("linear family endpoints") {
    const LinearFamily f{-0.3, 0.3};
    CHECK(f.at(4, 1) == doctest::Approx(-0.3));
    CHECK(f.at(4, 4) == doctest::Approx(0.0));
    CHECK(f.at(3, 2) == doctest::Approx(-0.15));
}

TEST_CASE("admissible parameters have no violations") {
    const ModelParams p = make_linear_model(16, {-0.3, 0.3}, {0.8, 0.4});
    CHECK(p.violations().empty());
    CHECK(p.delta0() == doctest::Approx(0.325));
    CHECK(p.sigma_min() == doctest::Approx(0.8));
    CHECK(p.sigma_max() == doctest::Approx(1.2));
}

TEST_CASE("each violated condition is named") {
    ModelParams p = make_linear_model(8, {0.3, -0.3}, {0.0, 0.0}, 0.2, 0.6, -1.0, 0.0);
    const auto v = p.violations();
    CHECK(mentions(v, "leader drift"));
    CHECK(mentions(v, "split threshold: delta in (0, 1/6)"));
    CHECK(mentions(v, "volatility: sigma(N,k) must be strictly positive"));
    CHECK(mentions(v, "split law: eps0"));
    CHECK(mentions(v, "merger clock: exponent alpha > 0"));
    CHECK(mentions(v, "merger clock: constant c >= 0"));
}

TEST_CASE("theta mode names round trip") {
    CHECK(parse_theta_mode("paper") == ThetaMode::Paper);
    CHECK(parse_theta_mode(to_string(ThetaMode::Martingale)) == ThetaMode::Martingale);
    CHECK_THROWS(parse_theta_mode("other"));
}

TEST_CASE("minimal config loads") {
    const ScenarioConfig cfg = parse_config(kMinimal);
    CHECK(cfg.initial.size() == 3);
    CHECK(cfg.model.n_max == 8);
    CHECK(cfg.model.drift(3, 1) == doctest::Approx(-0.2));
    CHECK(cfg.model.theta_mode == ThetaMode::Martingale);
}

TEST_CASE("delta = 0.2 is rejected") {
    const auto v = config_errors(replace(kMinimal, "delta = 0.1", "delta = 0.2"));
    CHECK(mentions(v, "split threshold: delta in (0, 1/6)"));
}

TEST_CASE("table with g(N,1) > g(N,2) is rejected") {
    std::string text = replace(kMinimal, "drift = linear\ndrift_intercept = -0.2\ndrift_slope = 0.2\n",
                               "drift = table\n");
    text = replace(text, "n_max = 8", "n_max = 3");
    text += "[drift_table]\n2 = 0.1, 0.2\n3 = 0.5, 0.1, 0.3\n";
    const auto v = config_errors(text);
    CHECK(mentions(v, "leader drift"));
    CHECK(mentions(v, "N = 3"));
}

TEST_CASE("rejection lists every problem at once") {
    std::string text = replace(kMinimal, "delta = 0.1", "delta = 0.2");
    text = replace(text, "eps0 = 0.25", "eps0 = 0.75");
    text = replace(text, "dt = 0.001\n", "");
    text += "[run]\nbogus = 1\n";
    const auto v = config_errors(text);
    CHECK(mentions(v, "split threshold"));
    CHECK(mentions(v, "split law"));
    CHECK(mentions(v, "missing key [model] dt"));
    CHECK(mentions(v, "unknown key [run] bogus"));
}

TEST_CASE("incomplete tables and bad numbers are reported") {
    std::string text = replace(kMinimal, "vol = linear\nvol_intercept = 1\nvol_slope = 0\n", "vol = table\n");
    text = replace(text, "n_max = 8", "n_max = 3");
    text = replace(text, "delta = 0.1", "delta = abc");
    text += "[vol_table]\n2 = 1, 1\n";
    const auto v = config_errors(text);
    CHECK(mentions(v, "missing row for N = 3"));
    CHECK(mentions(v, "cannot parse 'abc'"));
}

TEST_CASE("unknown portfolio rules are rejected") {
    const auto v = config_errors(std::string(kMinimal) + "[portfolio]\nrules = cash, leverage\n");
    CHECK(mentions(v, "[portfolio]"));
}

TEST_CASE("shipped config is valid") {
    const ScenarioConfig cfg = load_config(DIVMKT_DEFAULT_CONFIG);
    CHECK(cfg.model.violations().empty());
    CHECK(cfg.model.clock_c == 1.0);
    CHECK(cfg.model.clock_alpha == 2.0);
    CHECK(cfg.model.n_max == 64);
}
