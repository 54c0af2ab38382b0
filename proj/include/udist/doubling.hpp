#pragma once

// The doubling map T: x -> 2x mod 1 on exact points: finite binary strings
// (dyadic rationals) and rationals with eventually periodic orbits.

#include "udist/empirical.hpp"
#include "udist/rational.hpp"
#include "udist/torus.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace udist {

/// alpha = sum_{j=1}^{L} a_j 2^-j. Only shifts k < L are defined: beyond the
/// stored digits the expansion is unknown, not zero.
class BinaryPoint {
public:
    explicit BinaryPoint(std::vector<std::uint8_t> digits);
    /// First L digits of x in [0, 1) (the expansion that does not end in 1s).
    static BinaryPoint from_rational(const Rational& x, std::size_t length);
    /// Parses "0.1011" or "1011".
    static BinaryPoint parse(const std::string& text);

    std::size_t length() const noexcept { return digits_.size(); }
    /// a_j, 1-based.
    std::uint8_t digit(std::size_t j) const { return digits_.at(j - 1); }
    const std::vector<std::uint8_t>& digits() const noexcept { return digits_; }
    Rational value() const;
    /// T^k alpha as a point; throws DigitExhaustion unless k < L.
    TorusPoint shift(std::size_t k) const;
    std::string to_string() const;

private:
    std::vector<std::uint8_t> digits_;
    BigInt numerator_;  // value * 2^L
};

class DigitExhaustion : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// T^k alpha for k = 1..K.
std::vector<TorusPoint> doubling_orbit(const BinaryPoint& alpha, std::size_t count);
std::vector<TorusPoint> doubling_orbit(const TorusPoint& alpha, std::size_t count);

struct OrbitPeriod {
    std::uint64_t preperiod = 0;  // exponent of 2 in the denominator
    std::uint64_t period = 1;     // multiplicative order of 2 modulo the odd part
};
/// Throws std::invalid_argument if the order exceeds max_period.
OrbitPeriod orbit_period(const Rational& alpha, std::uint64_t max_period = 1u << 26);

class PartitionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// max over cells A of |mu(A) - mu(T^-1 A)| for the empirical measure of the
/// points; mu(T^-1 A) counts points whose image lies in A. Only dyadic
/// partitions are accepted.
Rational invariance_defect(std::span<const TorusPoint> points, const CellPartition& partition);

struct WindowCount {
    std::uint64_t end = 0;
    std::uint64_t hits = 0;
    Rational density;
};

struct OrbitHitReport {
    std::uint64_t horizon = 0;
    std::uint64_t hits = 0;
    Rational density;
    std::vector<WindowCount> windows;
};

struct FiveSixthReport {
    OrbitHitReport orbit;
    TorusInterval target = TorusInterval::open(0, 1);   // I' = (1/2 - a/3, 3/4 + a/3)
    TorusInterval shifted = TorusInterval::open(0, 1);  // I_a = I' - a
    std::uint64_t minus_hits = 0;                       // #{k : 2^k a in I^-}
    std::uint64_t plus_hits = 0;                        // #{k : 2^k a in I^+}
    bool counts_agree = false;                          // (2^k+1)a in I' iff 2^k a in I_a, for every k
    // Exact disjointness of T(I^-), T^2(I^-), T(I^+) from I_a.
    bool t_minus_disjoint = false;
    bool t2_minus_disjoint = false;
    bool t_plus_disjoint = false;
    Rational bound;                                     // 5/6 + 3/K
    bool holds = false;                                 // density <= bound
};

/// Counts k = 1..K with (2^k + 1) alpha mod 1 in I'. Requires 0 < alpha < 1/16.
FiveSixthReport five_sixth_check(const Rational& alpha, std::uint64_t horizon);

/// For each window end N (N <= L), counts k = 0..N-1 with
/// T^k alpha + alpha mod 1 in (1/2, 3/4).
OrbitHitReport zero_block_density(const BinaryPoint& alpha, std::span<const std::uint64_t> window_ends);

} // namespace udist
