#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

namespace divmkt {

/// Identifier recorded in run reports so a run can be replayed bit-for-bit.
inline constexpr std::string_view kStreamAlgorithm = "philox4x32-10";

/// Counter-based generator (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3"). A block is a pure function of (counter, key).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key) noexcept;
};

/// Random stream owned by one Monte Carlo path.
///
/// The key is the global seed and the upper half of the counter is the stream
/// id, so stream `p` never overlaps stream `q` and adding streams does not
/// perturb existing ones. Satisfies UniformRandomBitGenerator, so the
/// standard distributions can be driven by it directly.
class PathStream {
public:
    using result_type = std::uint64_t;

    PathStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double normal();
    /// Exponential holding time; +inf for a zero rate.
    double exponential(double rate) noexcept;

    std::uint64_t stream_id() const noexcept { return stream_; }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int consumed_ = 2;
    std::normal_distribution<double> normal_;
};

/// Derives an independent seed for a named sub-experiment of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

} // namespace divmkt
