#include "divmkt/config.hpp"
#include "divmkt/errors.hpp"
#include "divmkt/harness.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

namespace {

struct CommonFlags {
    std::string config = "configs/default.ini";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> horizon;
    std::optional<double> dt;
    std::optional<int> workers;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "scenario file")->capture_default_str();
    cmd->add_option("--seed", f.seed, "global seed");
    cmd->add_option("--paths", f.paths, "Monte Carlo paths (overrides every path count)");
    cmd->add_option("--horizon", f.horizon, "time horizon T");
    cmd->add_option("--dt", f.dt, "Euler step");
    cmd->add_option("--workers", f.workers, "worker threads");
    cmd->add_option("--out", f.out, "output directory");
}

divmkt::ScenarioConfig resolve(const CommonFlags& f) {
    divmkt::ScenarioConfig cfg = divmkt::load_config(f.config);
    if (f.seed) {
        cfg.run.seed = *f.seed;
    }
    if (f.paths) {
        if (*f.paths == 0) {
            throw CLI::ValidationError("--paths", "must be at least 1");
        }
        divmkt::override_paths(cfg, *f.paths);
    }
    if (f.horizon) {
        if (!(*f.horizon > 0.0)) {
            throw CLI::ValidationError("--horizon", "must be positive");
        }
        cfg.run.horizon = *f.horizon;
    }
    if (f.dt) {
        if (!(*f.dt > 0.0)) {
            throw CLI::ValidationError("--dt", "must be positive");
        }
        cfg.model.dt = *f.dt;
    }
    if (f.workers) {
        if (*f.workers < 1) {
            throw CLI::ValidationError("--workers", "must be at least 1");
        }
        cfg.run.workers = *f.workers;
    }
    if (f.out) {
        cfg.run.out = *f.out;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo engine for diverse markets with splits and mergers"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* simulate = app.add_subcommand("simulate", "simulate paths and write series, events and summaries");
    auto* verify = app.add_subcommand("verify", "run every acceptance check");
    auto* bounds = app.add_subcommand("bound-check", "analytic bounds against Monte Carlo");
    auto* mart = app.add_subcommand("martingale", "E[Z(T) V(T)] for every configured portfolio");
    auto* tail = app.add_subcommand("tail", "tail of the maximal company count");
    for (auto* cmd : {simulate, verify, bounds, mart, tail}) {
        add_common(cmd, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const divmkt::ScenarioConfig cfg = resolve(flags);
        const std::filesystem::path out = cfg.run.out;
        divmkt::RunReport report;
        if (simulate->parsed()) {
            report = divmkt::simulate(cfg, out);
            divmkt::print_report(report, std::cout);
        } else if (verify->parsed()) {
            report = divmkt::verify(cfg, out, &std::cout);
        } else if (bounds->parsed()) {
            report = divmkt::bound_check(cfg, out, &std::cout);
        } else if (mart->parsed()) {
            report = divmkt::martingale(cfg, out);
            divmkt::print_report(report, std::cout);
        } else {
            report = divmkt::tail(cfg, out);
            divmkt::print_report(report, std::cout);
        }
        std::cout << (report.all_pass() ? "all checks passed" : "some checks failed") << " ("
                  << divmkt::format_number(report.wall_seconds) << " s), report in " << (out / "report.csv").string()
                  << '\n';
        return report.all_pass() ? 0 : 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const divmkt::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
