#include "divmkt/config.hpp"

#include "divmkt/errors.hpp"
#include "divmkt/portfolio.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace divmkt {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out = "invalid configuration:";
    for (const auto& l : lines) {
        out += "\n  - " + l;
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        boost::algorithm::trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

namespace pt = boost::property_tree;

class Reader {
public:
    Reader(const pt::ptree& root, std::vector<std::string>& errors) : root_(root), errors_(errors) {}

    std::optional<std::string> text(const std::string& section, const std::string& key, bool required) {
        known_[section].insert(key);
        const auto sec = root_.get_child_optional(section);
        const auto value = sec ? sec->get_optional<std::string>(key) : boost::none;
        if (!value) {
            if (required) {
                errors_.push_back("missing key [" + section + "] " + key);
            }
            return std::nullopt;
        }
        return boost::algorithm::trim_copy(*value);
    }

    template <class T>
    void number(const std::string& section, const std::string& key, T& target, bool required = false) {
        if (const auto s = text(section, key, required)) {
            if (const auto v = parse_number<T>(*s)) {
                target = *v;
            } else {
                errors_.push_back("[" + section + "] " + key + ": cannot parse '" + *s + "'");
            }
        }
    }

    template <class T>
    void list(const std::string& section, const std::string& key, std::vector<T>& target) {
        if (const auto s = text(section, key, false)) {
            std::vector<T> values;
            for (const auto& item : split_list(*s)) {
                if (const auto v = parse_number<T>(item)) {
                    values.push_back(*v);
                } else {
                    errors_.push_back("[" + section + "] " + key + ": cannot parse '" + item + "'");
                }
            }
            target = std::move(values);
        }
    }

    /// Marks every key of `section` as known, for free-form sections.
    void accept_section(const std::string& section) { open_.insert(section); }

    void report_unknown() const {
        for (const auto& [section, body] : root_) {
            if (open_.count(section)) {
                continue;
            }
            const auto it = known_.find(section);
            if (it == known_.end()) {
                errors_.push_back("unknown section [" + section + "]");
                continue;
            }
            for (const auto& [key, value] : body) {
                if (!it->second.count(key)) {
                    errors_.push_back("unknown key [" + section + "] " + key);
                }
            }
        }
    }

private:
    const pt::ptree& root_;
    std::vector<std::string>& errors_;
    std::map<std::string, std::set<std::string>> known_;
    std::set<std::string> open_;
};

std::optional<RankTable> read_coefficients(Reader& r, const pt::ptree& root, const std::string& name, int n_max,
                                           std::vector<std::string>& errors) {
    const auto form = r.text("model", name, true);
    if (!form) {
        return std::nullopt;
    }
    if (*form == "linear") {
        LinearFamily fam;
        r.number("model", name + "_intercept", fam.intercept, true);
        r.number("model", name + "_slope", fam.slope, true);
        return RankTable::from_family(n_max, fam);
    }
    if (*form != "table") {
        errors.push_back("[model] " + name + ": expected 'linear' or 'table', got '" + *form + "'");
        return std::nullopt;
    }
    const std::string section = name + "_table";
    r.accept_section(section);
    const auto body = root.get_child_optional(section);
    RankTable table(n_max, std::numeric_limits<double>::quiet_NaN());
    bool complete = true;
    for (int n = 2; n <= n_max; ++n) {
        const auto row = body ? body->get_optional<std::string>(std::to_string(n)) : boost::none;
        if (!row) {
            errors.push_back("[" + section + "] missing row for N = " + std::to_string(n));
            complete = false;
            continue;
        }
        const auto items = split_list(*row);
        if (items.size() != static_cast<std::size_t>(n)) {
            errors.push_back("[" + section + "] row N = " + std::to_string(n) + " needs " + std::to_string(n) +
                             " entries, got " + std::to_string(items.size()));
            complete = false;
            continue;
        }
        for (int k = 1; k <= n; ++k) {
            const auto v = parse_number<double>(items[static_cast<std::size_t>(k - 1)]);
            if (!v) {
                errors.push_back("[" + section + "] row N = " + std::to_string(n) + ": cannot parse '" +
                                 items[static_cast<std::size_t>(k - 1)] + "'");
                complete = false;
                continue;
            }
            table.at(n, k) = *v;
        }
    }
    if (body) {
        for (const auto& [key, value] : *body) {
            const auto n = parse_number<int>(key);
            if (!n || *n < 2 || *n > n_max) {
                errors.push_back("[" + section + "] unexpected row '" + key + "'");
            }
        }
    }
    if (!complete) {
        return std::nullopt;
    }
    return table;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

ScenarioConfig parse_config(const std::string& text) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({std::string("cannot parse configuration: ") + e.message() + " at line " +
                           std::to_string(e.line())});
    }

    std::vector<std::string> errors;
    Reader r(root, errors);
    ScenarioConfig cfg;
    ModelParams& m = cfg.model;

    r.number("model", "n_max", m.n_max);
    r.number("model", "delta", m.delta, true);
    r.number("model", "eps0", m.eps0, true);
    r.number("model", "dt", m.dt, true);
    r.number("model", "clock_c", m.clock_c);
    r.number("model", "clock_alpha", m.clock_alpha);
    if (const auto mode = r.text("model", "theta_mode", false)) {
        try {
            m.theta_mode = parse_theta_mode(*mode);
        } catch (const std::logic_error& e) {
            errors.push_back(std::string("[model] theta_mode: ") + e.what());
        }
    }
    if (const auto dist = r.text("model", "split_dist", false)) {
        if (*dist == "uniform") {
            m.split.kind = SplitDistribution::Kind::Uniform;
        } else if (*dist == "half") {
            m.split.kind = SplitDistribution::Kind::Half;
        } else if (*dist == "beta") {
            m.split.kind = SplitDistribution::Kind::Beta;
        } else {
            errors.push_back("[model] split_dist: expected uniform, half or beta, got '" + *dist + "'");
        }
    }
    r.number("model", "beta_a", m.split.beta_a);
    r.number("model", "beta_b", m.split.beta_b);

    if (m.n_max < 3) {
        errors.push_back("n_max must be at least 3");
    } else {
        auto drift = read_coefficients(r, root, "drift", m.n_max, errors);
        auto vol = read_coefficients(r, root, "vol", m.n_max, errors);
        if (drift && vol) {
            m.drift = std::move(*drift);
            m.vol = std::move(*vol);
            for (auto& v : m.violations()) {
                errors.push_back(std::move(v));
            }
        }
    }

    std::vector<double> caps;
    r.list("initial", "caps", caps);
    int n0 = 0;
    r.number("initial", "n", n0);
    if (!caps.empty() && n0 != 0) {
        errors.push_back("[initial] give either caps or n, not both");
    } else if (caps.empty() && n0 == 0) {
        errors.push_back("missing key [initial] caps (or n)");
    } else {
        try {
            cfg.initial = caps.empty() ? MarketState::equal_caps(n0) : MarketState::from_caps(caps);
            if (cfg.initial.size() > m.n_max) {
                errors.push_back("[initial] more companies than n_max");
            }
        } catch (const std::logic_error& e) {
            errors.push_back(std::string("[initial] ") + e.what());
        }
    }

    RunSettings& run = cfg.run;
    r.number("run", "horizon", run.horizon);
    r.number("run", "paths", run.paths);
    r.number("run", "seed", run.seed);
    r.number("run", "workers", run.workers);
    r.number("run", "stride", run.stride);
    if (const auto out = r.text("run", "out", false)) {
        run.out = *out;
    }
    if (!(run.horizon > 0.0)) {
        errors.push_back("[run] horizon must be positive");
    }
    if (run.paths == 0) {
        errors.push_back("[run] paths must be positive");
    }
    if (run.workers < 1) {
        errors.push_back("[run] workers must be at least 1");
    }

    if (const auto rules = r.text("portfolio", "rules", false)) {
        cfg.portfolios = split_list(*rules);
    }
    for (const auto& name : cfg.portfolios) {
        try {
            (void)make_rule(name);
        } catch (const std::logic_error& e) {
            errors.push_back(std::string("[portfolio] ") + e.what());
        }
    }

    r.list("tail", "u_grid", cfg.u_grid);

    VerifySettings& v = cfg.verify;
    r.number("verify", "paths", v.paths);
    r.number("verify", "bound_paths", v.bound_paths);
    r.number("verify", "rbm_paths", v.rbm_paths);
    r.number("verify", "segments", v.segments);
    r.number("verify", "single_name_paths", v.single_name_paths);
    r.number("verify", "determinism_paths", v.determinism_paths);
    r.number("verify", "lemma_top_weight", v.lemma_top_weight);
    r.number("verify", "lemma_n", v.lemma_n);
    r.list("verify", "lambda_grid", v.lambda_grid);
    r.list("verify", "delta_grid", v.delta_grid);
    r.list("verify", "double_jump_n", v.double_jump_n);
    r.number("verify", "double_jump_target", v.double_jump_target);
    r.number("verify", "rbm_dt", v.rbm_dt);
    if (!(v.lemma_top_weight > 0.0 && v.lemma_top_weight < 1.0)) {
        errors.push_back("[verify] lemma_top_weight must lie in (0, 1)");
    }
    if (v.lemma_n < 2 || v.lemma_n > m.n_max) {
        errors.push_back("[verify] lemma_n must lie in 2..n_max");
    }
    for (int n : v.double_jump_n) {
        if (n < 3 || n > m.n_max) {
            errors.push_back("[verify] double_jump_n entries must lie in 3..n_max");
            break;
        }
    }

    r.report_unknown();
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError({"cannot open configuration file " + file.string()});
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace divmkt
