#include "divmkt/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace divmkt {

bool RunReport::all_pass() const noexcept {
    for (const auto& r : rows) {
        if (!r.pass) {
            return false;
        }
    }
    return true;
}

std::vector<const CheckRow*> RunReport::criterion(int k) const {
    std::vector<const CheckRow*> out;
    for (const auto& r : rows) {
        if (r.criterion == k) {
            out.push_back(&r);
        }
    }
    return out;
}

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void write_report_csv(const RunReport& report, std::ostream& out) {
    out << "# command=" << report.command << " seed=" << report.seed << " stream=" << report.stream_algorithm
        << " paths=" << report.paths << " failed_paths=" << report.failed_paths
        << " wall_seconds=" << format_number(report.wall_seconds) << '\n';
    out << "criterion,check,estimate,stderr,target,pass,detail\n";
    for (const auto& r : report.rows) {
        out << r.criterion << ',' << csv_field(r.name) << ',' << format_number(r.estimate) << ','
            << format_number(r.std_error) << ',' << format_number(r.target) << ',' << (r.pass ? "pass" : "fail")
            << ',' << csv_field(r.detail) << '\n';
    }
}

void write_report_csv(const RunReport& report, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + file.string());
    }
    write_report_csv(report, out);
}

void print_report(const RunReport& report, std::ostream& out) {
    for (const auto& r : report.rows) {
        out << (r.pass ? "PASS " : "FAIL ");
        if (r.criterion > 0) {
            out << '[' << r.criterion << "] ";
        }
        out << r.name << ": estimate " << format_number(r.estimate);
        if (!std::isnan(r.std_error)) {
            out << " (se " << format_number(r.std_error) << ')';
        }
        if (!std::isnan(r.target)) {
            out << ", target " << format_number(r.target);
        }
        if (!r.detail.empty()) {
            out << "; " << r.detail;
        }
        out << '\n';
    }
}

} // namespace divmkt
