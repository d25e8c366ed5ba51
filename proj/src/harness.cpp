#include "divmkt/harness.hpp"

#include "divmkt/analytic_bounds.hpp"
#include "divmkt/market_events.hpp"
#include "divmkt/measure_change.hpp"
#include "divmkt/path_engine.hpp"
#include "divmkt/portfolio.hpp"
#include "divmkt/random.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace divmkt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + file.string());
    }
    return out;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RunReport start_report(const ScenarioConfig& cfg, std::string command) {
    RunReport r;
    r.command = std::move(command);
    r.seed = cfg.run.seed;
    r.stream_algorithm = std::string(kStreamAlgorithm);
    return r;
}

void finish(RunReport& report, const Stopwatch& clock, const std::filesystem::path& out) {
    report.wall_seconds = clock.seconds();
    std::filesystem::create_directories(out);
    write_report_csv(report, out / "report.csv");
}

void append(RunReport& report, std::vector<CheckRow> rows, std::ostream* log) {
    if (log) {
        RunReport part;
        part.rows = rows;
        print_report(part, *log);
        log->flush();
    }
    for (auto& r : rows) {
        report.rows.push_back(std::move(r));
    }
}

void formula_rows(const ScenarioConfig& cfg, RunReport& report) {
    const ModelParams& m = cfg.model;
    // Both closed forms of p_N must agree; the bound must not grow with lambda.
    double worst = 0.0;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 3; n <= m.n_max; ++n) {
        const double lambda = clock_rate(n, m);
        const double a = p_n(m.delta, m.delta0(), m.sigma_max(), lambda);
        const double b = p_n_exponential(m.delta, m.delta0(), m.sigma_max(), lambda);
        if (a > 0.0) {
            worst = std::max(worst, std::abs(a - b) / a);
        }
        monotone = monotone && a <= prev;
        prev = a;
    }
    report.rows.push_back({0, "p_N closed forms agree (max relative gap)", worst, kNaN, 1e-12, worst <= 1e-12, ""});
    report.rows.push_back({0, "p_N nonincreasing in N", monotone ? 0.0 : 1.0, kNaN, 0.0, monotone, ""});
}

} // namespace

void override_paths(ScenarioConfig& cfg, std::size_t paths) {
    cfg.run.paths = paths;
    cfg.verify.paths = paths;
    cfg.verify.bound_paths = paths;
    cfg.verify.rbm_paths = paths;
    cfg.verify.segments = paths;
    cfg.verify.single_name_paths = paths;
    cfg.verify.determinism_paths = paths;
}

RunReport simulate(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    const Stopwatch clock;
    RunReport report = start_report(cfg, "simulate");
    report.paths = cfg.run.paths;

    RuleSet rules;
    std::vector<std::string> names;
    for (const auto& spec : cfg.portfolios) {
        rules.push_back(make_rule(spec));
        names.push_back(rules.back()->name());
    }
    PathOptions options;
    options.horizon = cfg.run.horizon;
    options.series_stride = cfg.run.stride > 0 ? cfg.run.stride : 1;
    options.record_events = true;
    const auto results = simulate_paths(cfg.model, cfg.initial, rules, options, cfg.run.seed, cfg.run.paths,
                                        cfg.run.workers);

    std::filesystem::create_directories(out);
    auto series = open_out(out / "paths.csv");
    auto summary = open_out(out / "summary.csv");
    auto events = open_out(out / "events.jsonl");

    series << "path,t,N,mu1,V_mu";
    summary << "path,status,t_end,N_end,max_N,splits,mergers,V_mu";
    for (const auto& n : names) {
        series << ",V_" << n;
        summary << ",V_" << n;
    }
    series << ",Z\n";
    summary << ",Z,diagnostic\n";

    std::size_t splits = 0;
    std::size_t mergers = 0;
    int max_n = 0;
    for (const auto& r : results) {
        for (const auto& s : r.series) {
            series << r.path << ',' << format_number(s.t) << ',' << s.n << ',' << format_number(s.top_weight) << ','
                   << format_number(s.market_wealth);
            for (double w : s.wealth) {
                series << ',' << format_number(w);
            }
            series << ',' << format_number(s.z) << '\n';
        }
        summary << r.path << ',' << to_string(r.status) << ',' << format_number(r.t_end) << ',' << r.n_end << ','
                << r.max_count << ',' << r.diag.splits << ',' << r.diag.mergers << ','
                << format_number(r.market_wealth);
        for (double w : r.wealth) {
            summary << ',' << format_number(w);
        }
        summary << ',' << format_number(r.girsanov(cfg.model.theta_mode).z()) << ',' << csv_field(r.diagnostic)
                << '\n';
        for (const auto& ev : r.events) {
            events << to_json_line(ev, r.path) << '\n';
        }
        report.failed_paths += r.ok() ? 0 : 1;
        splits += r.diag.splits;
        mergers += r.diag.mergers;
        max_n = std::max(max_n, r.max_count);
    }
    const double p = static_cast<double>(results.size());
    report.rows.push_back({0, "splits per path", static_cast<double>(splits) / p, kNaN, kNaN, true, ""});
    report.rows.push_back({0, "mergers per path", static_cast<double>(mergers) / p, kNaN, kNaN, true, ""});
    report.rows.push_back({0, "largest company count", static_cast<double>(max_n), kNaN,
                           static_cast<double>(cfg.model.n_max), report.failed_paths == 0,
                           std::to_string(report.failed_paths) + " failed paths"});
    finish(report, clock, out);
    return report;
}

RunReport verify(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream* log) {
    const Stopwatch clock;
    RunReport report = start_report(cfg, "verify");
    report.paths = cfg.verify.paths;
    const int workers = cfg.run.workers;

    const MainRun run = run_main(cfg, cfg.verify.paths, workers);
    report.failed_paths = run.failed_paths();
    append(report, check_diversity(cfg, run), log);
    append(report, check_conservation(cfg, run), log);
    append(report, check_no_suppressed_merger(run), log);
    append(report, check_market_identity(run), log);
    append(report, check_lemma_grid(cfg, workers), log);
    append(report, check_rbm_formula(cfg, workers), log);
    append(report, check_double_jump(cfg, workers), log);
    append(report, check_tail(cfg, run), log);
    append(report, check_martingale(cfg, run), log);
    append(report, check_single_name(cfg, workers), log);
    append(report, check_determinism(cfg, out / "determinism"), log);
    finish(report, clock, out);
    return report;
}

RunReport bound_check(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream* log) {
    const Stopwatch clock;
    RunReport report = start_report(cfg, "bound-check");
    report.paths = cfg.verify.bound_paths;
    formula_rows(cfg, report);
    append(report, check_lemma_grid(cfg, cfg.run.workers), log);
    append(report, check_rbm_formula(cfg, cfg.run.workers), log);
    append(report, check_double_jump(cfg, cfg.run.workers), log);
    finish(report, clock, out);
    return report;
}

RunReport martingale(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    const Stopwatch clock;
    RunReport report = start_report(cfg, "martingale");
    report.paths = cfg.verify.paths;
    const MainRun run = run_main(cfg, cfg.verify.paths, cfg.run.workers);
    report.failed_paths = run.failed_paths();
    append(report, check_martingale(cfg, run), nullptr);
    finish(report, clock, out);
    return report;
}

RunReport tail(const ScenarioConfig& cfg, const std::filesystem::path& out) {
    const Stopwatch clock;
    RunReport report = start_report(cfg, "tail");
    report.paths = cfg.verify.paths;
    const TailEstimate est = tail_of_max_count(cfg.model, cfg.initial, cfg.run.horizon, cfg.u_grid, cfg.verify.paths,
                                               derive_seed(cfg.run.seed, "main"), cfg.run.workers);
    report.failed_paths = est.failed_paths;
    for (const auto& pt : est.points) {
        std::ostringstream name;
        name << "P(max N > " << format_number(pt.u) << ")";
        report.rows.push_back({0, name.str(), pt.tail.estimate, pt.tail.std_error, kNaN, true,
                               "-log p / u = " + format_number(pt.rate) + " in [" + format_number(pt.rate_ci.lo) +
                                   ", " + format_number(pt.rate_ci.hi) + "]"});
    }
    std::size_t compared = 0;
    const bool monotone = tail_rate_nondecreasing(est, &compared);
    report.rows.push_back({8, "tail rate nondecreasing over separated u pairs", static_cast<double>(compared), kNaN,
                           1.0, monotone && compared >= 1, ""});
    report.rows.push_back({8, "explosion guard firings", static_cast<double>(est.guard_fired), kNaN, 0.0,
                           est.guard_fired == 0, ""});
    finish(report, clock, out);
    return report;
}

} // namespace divmkt
