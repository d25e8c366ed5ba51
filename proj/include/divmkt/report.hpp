#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace divmkt {

/// One verification row: what was measured, against which target, and
/// whether it passed. Numbers that do not apply are NaN.
struct CheckRow {
    int criterion = 0;
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string command;
    std::uint64_t seed = 0;
    std::string stream_algorithm;
    double wall_seconds = 0.0;
    std::size_t paths = 0;
    std::size_t failed_paths = 0;
    std::vector<CheckRow> rows;

    bool all_pass() const noexcept;
    /// Rows for one acceptance criterion.
    std::vector<const CheckRow*> criterion(int k) const;
};

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// Quotes a CSV field only when it needs quoting.
std::string csv_field(std::string_view text);

void write_report_csv(const RunReport& report, std::ostream& out);
void write_report_csv(const RunReport& report, const std::filesystem::path& file);

/// Human-readable table of the rows.
void print_report(const RunReport& report, std::ostream& out);

} // namespace divmkt
