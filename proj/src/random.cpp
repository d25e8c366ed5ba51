#include "divmkt/random.hpp"

#include <cmath>
#include <limits>

namespace divmkt {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

Philox4x32::Counter Philox4x32::block(Counter counter, Key key) noexcept {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        counter = round(counter, key);
    }
    return counter;
}

PathStream::PathStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream_id) {}

PathStream::result_type PathStream::operator()() noexcept {
    if (consumed_ == 2) {
        buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                    key_);
        ++block_;
        consumed_ = 0;
    }
    const int at = 2 * consumed_++;
    return (static_cast<std::uint64_t>(buffer_[at + 1]) << 32) | buffer_[at];
}

double PathStream::uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double PathStream::normal() { return normal_(*this); }

double PathStream::exponential(double rate) noexcept {
    if (!(rate > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log(uniform()) / rate;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a
    for (unsigned char ch : tag) {
        h = (h ^ ch) * 0x100000001B3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

} // namespace divmkt
