#include "divmkt/checks.hpp"

#include "divmkt/analytic_bounds.hpp"
#include "divmkt/errors.hpp"
#include "divmkt/harness.hpp"
#include "divmkt/measure_change.hpp"
#include "divmkt/parallel.hpp"
#include "divmkt/random.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace divmkt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CheckRow row(int criterion, std::string name, double estimate, double se, double target, bool pass,
             std::string detail = {}) {
    return {criterion, std::move(name), estimate, se, target, pass, std::move(detail)};
}

std::string fmt(double x) { return format_number(x); }

/// |mean - 1| within k standard errors.
bool near_one(const SampleSummary& s, double k = 3.0) { return std::abs(s.mean - 1.0) <= k * s.std_error; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

std::size_t MainRun::failed_paths() const {
    return static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const PathResult& r) { return !r.ok(); }));
}

MainRun run_main(const ScenarioConfig& cfg, std::size_t paths, int workers) {
    RuleSet rules;
    MainRun out;
    for (const auto& name : cfg.portfolios) {
        rules.push_back(make_rule(name));
        out.rule_names.push_back(rules.back()->name());
    }
    PathOptions options;
    options.horizon = cfg.run.horizon;
    out.results = simulate_paths(cfg.model, cfg.initial, rules, options, derive_seed(cfg.run.seed, "main"), paths,
                                 workers);
    return out;
}

std::vector<CheckRow> check_diversity(const ScenarioConfig& cfg, const MainRun& run) {
    double max_weight = 0.0;
    double overshoot = -std::numeric_limits<double>::infinity();
    std::size_t splits = 0;
    for (const auto& r : run.results) {
        max_weight = std::max(max_weight, r.diag.max_weight);
        overshoot = std::max(overshoot, r.diag.max_split_overshoot);
        splits += r.diag.splits;
    }
    const double threshold = 1.0 - cfg.model.delta;
    const double allowed = 5.0 * cfg.model.sigma_max() * std::sqrt(cfg.model.dt);
    std::vector<CheckRow> rows;
    rows.push_back(row(1, "diversity: max post-event weight", max_weight, kNaN, threshold, max_weight < threshold,
                       std::to_string(run.results.size()) + " paths"));
    rows.push_back(row(1, "diversity: split overshoot in log weight", splits ? overshoot : 0.0, kNaN, allowed,
                       splits > 0 && overshoot <= allowed, std::to_string(splits) + " splits"));
    return rows;
}

std::vector<CheckRow> check_conservation(const ScenarioConfig& cfg, const MainRun& run) {
    double ulps = 0.0;
    double alloc = 0.0;
    bool continuous = true;
    std::size_t events = 0;
    for (const auto& r : run.results) {
        ulps = std::max(ulps, r.diag.max_cap_change_ulps);
        alloc = std::max(alloc, r.diag.max_allocation_change);
        continuous = continuous && r.diag.wealth_continuous;
        events += r.diag.splits + r.diag.mergers + r.diag.suppressed;
    }
    // Regrouping a sum of at most n_max weights, each bounded by 1.
    const double alloc_tol = 4.0 * DBL_EPSILON * cfg.model.n_max;
    const std::string ev = std::to_string(events) + " events";
    std::vector<CheckRow> rows;
    rows.push_back(row(2, "conservation: |C(T+) - C(T)| in ulp", ulps, kNaN, 4.0, events > 0 && ulps <= 4.0, ev));
    rows.push_back(row(2, "conservation: allocation change at transfers", alloc, kNaN, alloc_tol, alloc <= alloc_tol, ev));
    rows.push_back(row(2, "conservation: wealth continuous at events", continuous ? 0.0 : 1.0, kNaN, 0.0, continuous,
                       ev));
    return rows;
}

std::vector<CheckRow> check_no_suppressed_merger(const MainRun& run) {
    std::size_t suppressed = 0;
    std::size_t mergers = 0;
    for (const auto& r : run.results) {
        suppressed += r.diag.suppressed_three_plus;
        mergers += r.diag.mergers;
    }
    return {row(3, "suppressed mergers with N >= 3", static_cast<double>(suppressed), kNaN, 0.0,
                suppressed == 0 && mergers > 0, std::to_string(mergers) + " mergers")};
}

std::vector<CheckRow> check_market_identity(const MainRun& run) {
    double worst = 0.0;
    std::size_t market_rule = run.rule_names.size();
    for (std::size_t k = 0; k < run.rule_names.size(); ++k) {
        if (run.rule_names[k] == "market") {
            market_rule = k;
        }
    }
    std::size_t checked = 0;
    for (const auto& r : run.results) {
        if (!r.ok()) {
            continue;
        }
        ++checked;
        const double ratio = r.cap_final / r.cap_initial;
        worst = std::max(worst, std::abs(r.market_wealth / ratio - 1.0));
        if (market_rule < r.wealth.size()) {
            worst = std::max(worst, std::abs(r.wealth[market_rule] / ratio - 1.0));
        }
    }
    return {row(4, "market identity: max |V(T) C(0) / C(T) - 1|", worst, kNaN, 1e-9, checked > 0 && worst <= 1e-9,
                std::to_string(checked) + " paths")};
}

std::vector<CheckRow> check_lemma_grid(const ScenarioConfig& cfg, int workers) {
    const VerifySettings& v = cfg.verify;
    const int n = v.lemma_n;
    std::vector<double> caps(static_cast<std::size_t>(n), (1.0 - v.lemma_top_weight) / (n - 1));
    caps[0] = v.lemma_top_weight;
    const MarketState initial = MarketState::from_caps(caps);
    const double sigma_bar = cfg.model.sigma_max(n);

    std::vector<CheckRow> rows;
    for (double delta : v.delta_grid) {
        ModelParams params = cfg.model;
        params.delta = delta;
        for (double lambda : v.lambda_grid) {
            std::ostringstream tag;
            tag << "lemma/" << lambda << '/' << delta;
            const Proportion est = estimate_split_before_clock(params, initial, lambda, v.bound_paths,
                                                               derive_seed(cfg.run.seed, tag.str()), workers);
            const double bound = lemma_bound(v.lemma_top_weight, delta, sigma_bar, lambda);
            std::ostringstream name;
            name << "split before clock: N=" << n << " lambda=" << lambda << " delta=" << delta;
            rows.push_back(row(5, name.str(), est.estimate, est.std_error, bound,
                               est.estimate <= bound + 3.0 * est.std_error, std::to_string(est.trials) + " paths"));
        }
    }
    return rows;
}

Proportion rbm_oracle(double x_tilde, double y_tilde, double lambda, double sigma_bar, double dt, std::size_t paths,
                      std::uint64_t seed, int workers) {
    if (!(x_tilde >= 0.0 && x_tilde <= y_tilde && lambda > 0.0 && sigma_bar > 0.0 && dt > 0.0 && paths > 0)) {
        throw ContractViolation("rbm_oracle: invalid inputs");
    }
    const double var_rate = 2.0 * sigma_bar * sigma_bar;
    const auto hits = run_indexed(paths, workers, [&](std::size_t p) -> char {
        PathStream stream(seed, p);
        const double kill = stream.exponential(lambda);
        double x = x_tilde;
        if (x >= y_tilde) {
            return 1;
        }
        for (double t = 0.0; t < kill;) {
            const double h = std::min(dt, kill - t);
            const double free = x + std::sqrt(var_rate * h) * stream.normal();
            const double next = std::abs(free);
            if (next >= y_tilde) {
                return 1;
            }
            // Probability that the bridge from x to free crossed y inside the step.
            const double cross = std::exp(-2.0 * (y_tilde - x) * (y_tilde - free) / (var_rate * h));
            if (stream.uniform() < cross) {
                return 1;
            }
            x = next;
            t += h;
        }
        return 0;
    });
    return proportion(static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1)), paths);
}

std::vector<CheckRow> check_rbm_formula(const ScenarioConfig& cfg, int workers) {
    struct Point {
        double x;
        double delta;
        double lambda;
        double sigma_bar;
    };
    const Point points[] = {{0.2, 0.10, 4.0, 1.0}, {0.0, 0.05, 9.0, 1.2}, {0.3, 0.15, 1.0, 0.8}};
    std::vector<CheckRow> rows;
    int idx = 0;
    for (const auto& pt : points) {
        const double y = rbm_barrier(pt.delta);
        const double exact = rbm_hit_before_exp(pt.x, y, pt.lambda, pt.sigma_bar);
        const Proportion mc = rbm_oracle(pt.x, y, pt.lambda, pt.sigma_bar, cfg.verify.rbm_dt, cfg.verify.rbm_paths,
                                         derive_seed(cfg.run.seed, "rbm/" + std::to_string(idx++)), workers);
        std::ostringstream name;
        name << "reflected BM: x=" << pt.x << " y=" << fmt(y) << " lambda=" << pt.lambda
             << " sigma=" << pt.sigma_bar;
        rows.push_back(row(6, name.str(), mc.estimate, mc.std_error, exact,
                           std::abs(mc.estimate - exact) <= 3.0 * mc.std_error,
                           std::to_string(mc.trials) + " paths"));
    }
    return rows;
}

double clock_constant_for_p3(const ModelParams& params, double target) {
    if (!(target > 0.0 && target < 2.0)) {
        throw ContractViolation("target p_3 must lie in (0, 2)");
    }
    const double a1 = double_jump_exponent(params.delta, params.delta0(), params.sigma_max());
    const double root = std::log(2.0 / target) / a1;
    return root * root / std::pow(3.0, params.clock_alpha);
}

std::vector<CheckRow> check_double_jump(const ScenarioConfig& cfg, int workers) {
    ModelParams params = cfg.model;
    params.clock_c = std::max(params.clock_c, clock_constant_for_p3(params, cfg.verify.double_jump_target));
    const double sigma = params.sigma_max();
    std::vector<CheckRow> rows;
    for (int n : cfg.verify.double_jump_n) {
        const double lambda = clock_rate(n, params);
        const double bound = p_n(params.delta, params.delta0(), sigma, lambda);
        const DoubleJumpEstimate est = estimate_double_jump(params, n, cfg.verify.segments,
                                                            derive_seed(cfg.run.seed, "double-jump/" + std::to_string(n)),
                                                            workers);
        std::ostringstream name;
        name << "double jump: N=" << n << " lambda_N=" << fmt(lambda);
        std::ostringstream detail;
        detail << est.segments << " segments, c=" << fmt(params.clock_c) << ", undecided " << est.undecided;
        rows.push_back(row(7, name.str(), est.frequency.estimate, est.frequency.std_error, bound,
                           bound < 0.5 && est.frequency.estimate <= bound + 3.0 * est.frequency.std_error,
                           detail.str()));
    }
    return rows;
}

std::vector<CheckRow> check_tail(const ScenarioConfig& cfg, const MainRun& run) {
    std::vector<int> counts;
    counts.reserve(run.results.size());
    for (const auto& r : run.results) {
        if (r.status == PathStatus::Ok || r.status == PathStatus::ExplosionGuard) {
            counts.push_back(r.max_count);
        }
    }
    const TailEstimate est = tail_from_counts(counts, cfg.u_grid, cfg.model.n_max);
    std::size_t compared = 0;
    const bool monotone = tail_rate_nondecreasing(est, &compared);
    std::ostringstream detail;
    detail << counts.size() << " paths, c=" << fmt(cfg.model.clock_c) << ", alpha=" << fmt(cfg.model.clock_alpha)
           << ", T=" << fmt(cfg.run.horizon) << ", rates";
    for (const auto& pt : est.points) {
        detail << " u=" << fmt(pt.u) << ":" << fmt(pt.rate) << " [" << fmt(pt.rate_ci.lo) << ", "
               << fmt(pt.rate_ci.hi) << "] (p=" << fmt(pt.tail.estimate) << ")";
    }
    std::vector<CheckRow> rows;
    rows.push_back(row(8, "tail rate nondecreasing over separated u pairs", static_cast<double>(compared), kNaN, 1.0,
                       monotone && compared >= 1, detail.str()));
    rows.push_back(row(8, "explosion guard firings", static_cast<double>(est.guard_fired), kNaN, 0.0,
                       est.guard_fired == 0, "n_max=" + std::to_string(cfg.model.n_max)));
    return rows;
}

std::vector<CheckRow> check_martingale(const ScenarioConfig& cfg, const MainRun& run) {
    const ThetaMode mode = cfg.model.theta_mode;
    std::vector<double> z;
    std::vector<std::vector<double>> zv(run.rule_names.size());
    std::size_t failed = 0;
    for (const auto& r : run.results) {
        if (!r.ok()) {
            ++failed;
            continue;
        }
        const double zt = r.girsanov(mode).z();
        z.push_back(zt);
        for (std::size_t k = 0; k < zv.size(); ++k) {
            zv[k].push_back(zt * r.wealth[k]);
        }
    }
    const std::string detail = std::string("theta_mode=") + std::string(to_string(mode)) + ", " +
                               std::to_string(z.size()) + " paths, " + std::to_string(failed) + " failed";
    std::vector<CheckRow> rows;
    const SampleSummary sz = summarize(z);
    rows.push_back(row(9, "EMM: E[Z(T)]", sz.mean, sz.std_error, 1.0, failed == 0 && near_one(sz), detail));
    for (std::size_t k = 0; k < zv.size(); ++k) {
        const SampleSummary s = summarize(zv[k]);
        rows.push_back(row(9, "EMM: E[Z(T) V(T)] for " + run.rule_names[k], s.mean, s.std_error, 1.0,
                           failed == 0 && near_one(s), detail));
    }
    return rows;
}

std::vector<CheckRow> check_single_name(const ScenarioConfig& cfg, int workers) {
    const int n = 3;
    ModelParams params = make_linear_model(cfg.model.n_max, {0.0, 0.0}, {1.0, 0.0}, cfg.model.delta, cfg.model.eps0,
                                           cfg.model.clock_c, cfg.model.clock_alpha, cfg.model.dt);
    PathOptions options;
    options.horizon = 1.0;
    options.events_enabled = false;
    options.single_names = true;
    const RuleSet none;
    const auto results = simulate_paths(params, MarketState::equal_caps(n), none, options,
                                        derive_seed(cfg.run.seed, "single-name"), cfg.verify.single_name_paths,
                                        workers);
    std::vector<CheckRow> rows;
    for (const ThetaMode mode : {ThetaMode::Martingale, ThetaMode::Paper}) {
        for (int i = 0; i < n; ++i) {
            std::vector<double> v;
            v.reserve(results.size());
            for (const auto& r : results) {
                if (r.ok()) {
                    v.push_back(r.girsanov(mode).z() * r.single_name_ratio[static_cast<std::size_t>(i)]);
                }
            }
            const SampleSummary s = summarize(v);
            const bool consistent = near_one(s);
            const bool martingale = mode == ThetaMode::Martingale;
            std::ostringstream name;
            name << "single name: E[Z X_" << i + 1 << "(T) / X_" << i + 1 << "(0)] " << to_string(mode) << " mode "
                 << (martingale ? "consistent" : "rejected");
            rows.push_back(row(9, name.str(), s.mean, s.std_error, 1.0, martingale ? consistent : !consistent,
                               std::to_string(s.count) + " paths, g=0, sigma=1, events off"));
        }
    }
    return rows;
}

std::vector<CheckRow> check_determinism(const ScenarioConfig& cfg, const std::filesystem::path& scratch) {
    ScenarioConfig a = cfg;
    if (cfg.verify.determinism_paths > 0) {
        a.run.paths = cfg.verify.determinism_paths;
    }
    ScenarioConfig b = a;
    a.run.workers = 1;
    b.run.workers = 8;
    const auto dir_a = scratch / "workers-1";
    const auto dir_b = scratch / "workers-8";
    simulate(a, dir_a);
    simulate(b, dir_b);
    std::vector<CheckRow> rows;
    for (const char* file : {"paths.csv", "events.jsonl", "summary.csv"}) {
        const std::string x = read_file(dir_a / file);
        const std::string y = read_file(dir_b / file);
        rows.push_back(row(10, std::string("determinism: ") + file + " identical for 1 and 8 workers",
                           static_cast<double>(x.size()), kNaN, static_cast<double>(y.size()), !x.empty() && x == y,
                           std::to_string(a.run.paths) + " paths"));
    }
    return rows;
}

} // namespace divmkt
