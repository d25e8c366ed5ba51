#pragma once

#include "divmkt/config.hpp"
#include "divmkt/path_engine.hpp"
#include "divmkt/report.hpp"
#include "divmkt/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace divmkt {

/// Paths of the shipped scenario with every configured rule attached.
struct MainRun {
    std::vector<std::string> rule_names;
    std::vector<PathResult> results;
    std::size_t failed_paths() const;
};

MainRun run_main(const ScenarioConfig& cfg, std::size_t paths, int workers);

/// Top weight never at or above 1 - delta after resolution; split overshoot
/// in log weight within 5 sigma_bar sqrt(dt).
std::vector<CheckRow> check_diversity(const ScenarioConfig& cfg, const MainRun& run);
/// Total capitalization within 4 ulp across events, allocation conserved by
/// transfers, wealth unchanged at events.
std::vector<CheckRow> check_conservation(const ScenarioConfig& cfg, const MainRun& run);
std::vector<CheckRow> check_no_suppressed_merger(const MainRun& run);
/// V^mu(T) C(0) / C(T) = 1 within 1e-9 on every path.
std::vector<CheckRow> check_market_identity(const MainRun& run);
/// Split-before-clock frequency against lemma_bound over the lambda x delta grid.
std::vector<CheckRow> check_lemma_grid(const ScenarioConfig& cfg, int workers);
/// cosh formula against a reflected-BM Monte Carlo oracle.
std::vector<CheckRow> check_rbm_formula(const ScenarioConfig& cfg, int workers);
/// Harvested double-jump frequency against p_N with c raised until p_3 is informative.
std::vector<CheckRow> check_double_jump(const ScenarioConfig& cfg, int workers);
/// Tail rate -log p(u) / u nondecreasing across separated grid points; guard silent.
std::vector<CheckRow> check_tail(const ScenarioConfig& cfg, const MainRun& run);
/// E[Z(T)] and E[Z(T) V^pi(T)] against 1 in the configured theta mode.
std::vector<CheckRow> check_martingale(const ScenarioConfig& cfg, const MainRun& run);
/// Fixed-N single-name check with g = 0, sigma = 1: consistent in
/// martingale mode, rejected in paper mode.
std::vector<CheckRow> check_single_name(const ScenarioConfig& cfg, int workers);
/// simulate output byte-identical for 1 and 8 workers.
std::vector<CheckRow> check_determinism(const ScenarioConfig& cfg, const std::filesystem::path& scratch);

/// Reflected-BM oracle: |x + sqrt(2) sigma_bar dW| stepped at `dt` with a
/// Brownian-bridge crossing correction, killed at an exponential time.
Proportion rbm_oracle(double x_tilde, double y_tilde, double lambda, double sigma_bar, double dt, std::size_t paths,
                      std::uint64_t seed, int workers = 1);

/// Clock constant c at which p_3 equals `target` for the given model.
double clock_constant_for_p3(const ModelParams& params, double target);

} // namespace divmkt
