#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divmkt {

/// Which market price of risk drives the measure change.
enum class ThetaMode {
    Paper,      ///< theta = g / sigma: removes the drift of log X.
    Martingale, ///< theta = (g + sigma^2 / 2) / sigma: removes the drift of dX / X.
};

std::string_view to_string(ThetaMode mode) noexcept;
ThetaMode parse_theta_mode(std::string_view text);

/// Law of the fraction xi kept by the first child of a split, supported on
/// [1/2, 1 - eps0].
struct SplitDistribution {
    enum class Kind { Uniform, Half, Beta };
    Kind kind = Kind::Uniform;
    /// Shape parameters for Kind::Beta; the Beta variate is mapped affinely
    /// onto [1/2, 1 - eps0].
    double beta_a = 2.0;
    double beta_b = 2.0;
};

std::string_view to_string(SplitDistribution::Kind kind) noexcept;

/// g(N, k) or sigma(N, k) = intercept + slope * (k - 1) / (N - 1).
struct LinearFamily {
    double intercept = 0.0;
    double slope = 0.0;

    double at(int n, int k) const noexcept;
};

/// Per-rank coefficient table for every company count N = 2..n_max.
/// Ranks k are 1-based, matching the usual ranked notation.
class RankTable {
public:
    RankTable() = default;
    explicit RankTable(int n_max, double fill = 0.0);

    static RankTable from_family(int n_max, const LinearFamily& family);

    int n_max() const noexcept { return n_max_; }
    bool covers(int n) const noexcept { return n >= 2 && n <= n_max_; }

    double operator()(int n, int k) const;
    double& at(int n, int k);
    std::span<const double> row(int n) const;
    std::span<double> row(int n);

    double min() const;
    double max() const;

private:
    static std::size_t offset(int n) noexcept { return static_cast<std::size_t>((n - 1) * n / 2 - 1); }

    int n_max_ = 0;
    std::vector<double> values_;
};

/// Coefficients of the split/merger market model.
struct ModelParams {
    RankTable drift; ///< g(N, k), per unit time
    RankTable vol;   ///< sigma(N, k), per square-root unit time
    double delta = 0.1;
    double eps0 = 0.25;
    SplitDistribution split;
    double clock_c = 1.0;
    double clock_alpha = 2.0;
    int n_max = 64;
    double dt = 1e-3;
    ThetaMode theta_mode = ThetaMode::Martingale;

    /// Top weight is at most 1 - delta0 right after any split.
    double delta0() const noexcept { return 1.0 - (1.0 - delta) * (1.0 - eps0); }
    double sigma_min() const { return vol.min(); }
    double sigma_max() const { return vol.max(); }
    double sigma_max(int n) const;

    /// Every violated modelling assumption, each message naming it.
    /// Empty when the parameters are admissible.
    std::vector<std::string> violations() const;
};

/// Uniform-coefficient model used by tests and examples.
ModelParams make_linear_model(int n_max, LinearFamily drift, LinearFamily vol, double delta = 0.1,
                              double eps0 = 0.25, double clock_c = 1.0, double clock_alpha = 2.0,
                              double dt = 1e-3);

} // namespace divmkt
