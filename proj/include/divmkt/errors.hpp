#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divmkt {

/// Thrown when a caller breaks the precondition of an operation.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class PathErrorKind { ExplosionGuard, Overflow, NonPositiveWealth };

std::string_view to_string(PathErrorKind kind) noexcept;

/// A single Monte Carlo path could not be continued. The run that owns the
/// path records the diagnostic and moves on to the next path.
class PathError : public std::runtime_error {
public:
    PathError(PathErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    PathErrorKind kind() const noexcept { return kind_; }

private:
    PathErrorKind kind_;
};

} // namespace divmkt
