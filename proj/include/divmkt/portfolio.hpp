#pragma once

#include "divmkt/market_events.hpp"
#include "divmkt/params.hpp"
#include "divmkt/sde_core.hpp"
#include "divmkt/stats.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divmkt {

/// pi_0 = 1 - sum_i pi_i, the fraction of wealth held in the money market.
double money_market_weight(std::span<const double> pi) noexcept;

/// V (1 + sum_i pi_i r_i) with r_i = X_i(t + h) / X_i(t) - 1. Throws PathError
/// when the result is not positive, which only a leveraged rule at a coarse
/// step can cause.
double wealth_step(double wealth, std::span<const double> pi, std::span<const double> returns);

/// Merger transfer: the merged company carries pi_i + pi_j, others are renamed.
std::vector<double> transfer_on_merger(std::span<const double> pi, std::size_t i, std::size_t j);

/// Split transfer: the children share pi_i in proportion to their
/// capitalizations, others are renamed.
std::vector<double> transfer_on_split(std::span<const double> pi, std::size_t i, std::span<const double> caps_before,
                                      std::span<const double> caps_after);

/// Transfer matching the event kind; identity for a suppressed merger.
std::vector<double> transfer_on_event(std::span<const double> pi, const EventRecord& event);

/// A bounded mapping from the market state to portfolio weights.
class PortfolioRule {
public:
    virtual ~PortfolioRule() = default;

    virtual std::string name() const = 0;
    /// K_pi with |pi_i| <= K_pi at all times.
    virtual double bound() const = 0;
    /// Weights at `state`; `rank_to_index` is the state's rank permutation.
    virtual void weights(const MarketState& state, std::span<const std::size_t> rank_to_index,
                         std::vector<double>& out) const = 0;
    /// Called after every event with the weights held right before it. Rules
    /// that recompute from the state ignore it.
    virtual void on_event(const EventRecord& event, std::span<const double> weights_before);
    virtual std::unique_ptr<PortfolioRule> clone() const = 0;
};

/// Builds a rule from its config name: cash, market, equal, rank:K,
/// constant-mix:W.
std::unique_ptr<PortfolioRule> make_rule(std::string_view spec);

std::unique_ptr<PortfolioRule> make_cash();
std::unique_ptr<PortfolioRule> make_market();
std::unique_ptr<PortfolioRule> make_equal_weight();
/// Everything in the company currently holding rank k (1-based); all cash
/// while fewer than k companies exist.
std::unique_ptr<PortfolioRule> make_rank_tilt(int k);
/// Starts at w / N0 per company and is only changed by the event transfers.
std::unique_ptr<PortfolioRule> make_constant_mix(double total_weight);

struct ArbitrageProbe {
    Proportion at_least; ///< P(V^pi(T) >= V^rho(T))
    Proportion beats;    ///< P(V^pi(T) > V^rho(T))
    std::size_t failed_paths = 0;
};

/// Monte Carlo frequencies behind the relative-arbitrage definition.
ArbitrageProbe relative_arbitrage_probe(const ModelParams& params, const MarketState& initial,
                                        const PortfolioRule& pi, const PortfolioRule& rho, double horizon,
                                        std::size_t paths, std::uint64_t seed, int workers = 1);

} // namespace divmkt
