#pragma once

#include <cstdint>
#include <string_view>

namespace udist {

/// Counter-based SplitMix64: draw k (1-based) is mix64(seed + k * golden_gamma),
/// so any draw can be recomputed from (seed, k) alone. The bounded-integer
/// routine uses plain rejection so results do not depend on the standard
/// library's distribution implementations.
class SplitMix64 {
public:
    static constexpr std::string_view algorithm_name = "splitmix64";

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : seed_(seed) {}

    std::uint64_t next() noexcept;
    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform integer in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

    static std::uint64_t mix(std::uint64_t z) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace udist
