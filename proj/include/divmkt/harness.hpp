#pragma once

#include "divmkt/checks.hpp"
#include "divmkt/config.hpp"
#include "divmkt/report.hpp"

#include <filesystem>
#include <ostream>

namespace divmkt {

/// Runs run.paths paths and writes, under `out`:
///   paths.csv     path,t,N,mu1,V_mu,V_<rule>...,Z every run.stride steps
///   summary.csv   one row per path with its status and terminal values
///   events.jsonl  one JSON object per event, in path order
///   report.csv    provenance and run-level rows
/// Every file except report.csv is a pure function of the config.
RunReport simulate(const ScenarioConfig& cfg, const std::filesystem::path& out);

/// Every acceptance check. `log` receives one line per finished criterion.
RunReport verify(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream* log = nullptr);

/// Formula checks plus the split-before-clock, reflected-BM and double-jump grids.
RunReport bound_check(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream* log = nullptr);

/// E[Z(T) V^pi(T)] for every configured rule.
RunReport martingale(const ScenarioConfig& cfg, const std::filesystem::path& out);

/// Tail of the maximal company count over the configured u-grid.
RunReport tail(const ScenarioConfig& cfg, const std::filesystem::path& out);

/// Sets run.paths and every Monte Carlo size of the verification suite.
void override_paths(ScenarioConfig& cfg, std::size_t paths);

} // namespace divmkt
