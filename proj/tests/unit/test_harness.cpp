#include "doctest.h"

#include "divmkt/config.hpp"
#include "divmkt/harness.hpp"
#include "divmkt/report.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

using namespace divmkt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string first_line(const fs::path& file) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    return line;
}

std::size_t line_count(const fs::path& file) {
    std::ifstream in(file);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        ++n;
    }
    return n;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("divmkt-unit-" + name);
    fs::remove_all(dir);
    return dir;
}

ScenarioConfig small_config(std::size_t paths) {
    ScenarioConfig cfg = load_config(DIVMKT_DEFAULT_CONFIG);
    override_paths(cfg, paths);
    return cfg;
}

} // namespace

TEST_CASE("override_paths touches every Monte Carlo size") {
    ScenarioConfig cfg = small_config(123);
    CHECK(cfg.run.paths == 123);
    CHECK(cfg.verify.paths == 123);
    CHECK(cfg.verify.bound_paths == 123);
    CHECK(cfg.verify.rbm_paths == 123);
    CHECK(cfg.verify.segments == 123);
    CHECK(cfg.verify.single_name_paths == 123);
}

TEST_CASE("simulate writes the documented files") {
    const ScenarioConfig cfg = small_config(40);
    const fs::path out = scratch("simulate");
    const RunReport report = simulate(cfg, out);
    CHECK(report.paths == 40);
    CHECK(report.failed_paths == 0);
    CHECK(report.stream_algorithm.find("philox") != std::string::npos);

    CHECK(first_line(out / "paths.csv") == "path,t,N,mu1,V_mu,V_cash,V_market,V_equal,V_rank:1,Z");
    CHECK(line_count(out / "paths.csv") > 40);
    CHECK(line_count(out / "summary.csv") == 41);
    CHECK(fs::exists(out / "report.csv"));

    std::ifstream events(out / "events.jsonl");
    std::size_t n = 0;
    for (std::string line; std::getline(events, line); ++n) {
        CHECK(line.front() == '{');
        CHECK(line.back() == '}');
        CHECK(line.find("\"kind\"") != std::string::npos);
    }
    CHECK(n > 0);
}

TEST_CASE("simulate output does not depend on the worker count") {
    ScenarioConfig cfg = small_config(30);
    const fs::path a = scratch("workers-1");
    const fs::path b = scratch("workers-3");
    cfg.run.workers = 1;
    simulate(cfg, a);
    cfg.run.workers = 3;
    simulate(cfg, b);
    for (const char* file : {"paths.csv", "summary.csv", "events.jsonl"}) {
        CAPTURE(file);
        CHECK(slurp(a / file) == slurp(b / file));
    }
}

TEST_CASE("a different seed gives a different sample") {
    ScenarioConfig cfg = small_config(10);
    const fs::path a = scratch("seed-a");
    const fs::path b = scratch("seed-b");
    simulate(cfg, a);
    cfg.run.seed += 1;
    simulate(cfg, b);
    CHECK(slurp(a / "summary.csv") != slurp(b / "summary.csv"));
}

TEST_CASE("report csv round trip") {
    RunReport r;
    r.command = "unit";
    r.seed = 7;
    r.stream_algorithm = "philox4x32-10";
    r.paths = 3;
    r.rows.push_back({1, "diversity", 0.5, 0.01, 0.9, true, "a, \"quoted\" detail"});
    r.rows.push_back({4, "market identity", 1e-14, 0.0, 1e-9, false, ""});
    CHECK_FALSE(r.all_pass());
    CHECK(r.criterion(1).size() == 1);
    std::ostringstream csv;
    write_report_csv(r, csv);
    const std::string text = csv.str();
    CHECK(text.find("\"a, \"\"quoted\"\" detail\"") != std::string::npos);
    CHECK(text.find("market identity") != std::string::npos);
}

TEST_CASE("martingale and tail subcommands on a small run") {
    const ScenarioConfig cfg = small_config(200);
    const RunReport m = martingale(cfg, scratch("martingale"));
    CHECK(m.rows.size() >= 2);
    const RunReport t = tail(cfg, scratch("tail"));
    CHECK(t.rows.size() >= cfg.u_grid.size());
}
