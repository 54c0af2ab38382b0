#include "udist/rng.hpp"

#include <stdexcept>

namespace udist {

std::uint64_t SplitMix64::mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
    ++counter_;
    return mix(seed_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("SplitMix64::below: bound must be positive");
    }
    // Largest multiple of bound representable; values above it are rejected.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t draw = next();
    while (draw > limit) {
        draw = next();
    }
    return draw % bound;
}

std::uint64_t SplitMix64::between(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) {
        throw std::invalid_argument("SplitMix64::between: empty range");
    }
    if (lo == 0 && hi == UINT64_MAX) {
        return next();
    }
    return lo + below(hi - lo + 1);
}

} // namespace udist
