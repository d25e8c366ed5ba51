#pragma once

#include "divmkt/params.hpp"
#include "divmkt/sde_core.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace divmkt {

/// Raised by load_config with every problem found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct RunSettings {
    double horizon = 1.0;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t stride = 100; ///< series sample every `stride` steps
    std::string out = "out";
};

/// Monte Carlo sizes and grids for the verification suite.
struct VerifySettings {
    std::size_t paths = 100000;            ///< main run: diversity, conservation, EMM, tail
    std::size_t bound_paths = 100000;      ///< split-before-clock grid
    std::size_t rbm_paths = 100000;        ///< reflected-BM oracle
    std::size_t segments = 10000;          ///< double-jump segments per N
    std::size_t single_name_paths = 100000;
    std::size_t determinism_paths = 0;     ///< 0: use run.paths
    double lemma_top_weight = 0.7;
    int lemma_n = 5;
    std::vector<double> lambda_grid{4.0, 16.0, 64.0};
    std::vector<double> delta_grid{0.05, 0.10, 0.15};
    std::vector<int> double_jump_n{3, 4, 5};
    /// Double-jump check raises c until p_3 is at most this value.
    double double_jump_target = 0.4;
    double rbm_dt = 1e-3;
};

struct ScenarioConfig {
    ModelParams model;
    MarketState initial;
    RunSettings run;
    std::vector<std::string> portfolios{"cash", "market", "equal", "rank:1"};
    std::vector<double> u_grid{3.0, 4.0, 5.0, 6.0, 7.0};
    VerifySettings verify;
};

ScenarioConfig load_config(const std::filesystem::path& file);
ScenarioConfig parse_config(const std::string& text);

} // namespace divmkt
