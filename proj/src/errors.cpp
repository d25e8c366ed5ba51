#include "divmkt/errors.hpp"

namespace divmkt {

std::string_view to_string(PathErrorKind kind) noexcept {
    switch (kind) {
    case PathErrorKind::ExplosionGuard:
        return "explosion-guard";
    case PathErrorKind::Overflow:
        return "overflow";
    case PathErrorKind::NonPositiveWealth:
        return "non-positive-wealth";
    }
    return "unknown";
}

} // namespace divmkt
