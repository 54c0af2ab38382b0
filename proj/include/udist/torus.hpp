#pragma once

// Exact arithmetic on the circle R/Z: points, open arcs and the
// multiplication maps alpha -> n*alpha mod 1.

#include "udist/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace udist {

class TorusPoint {
public:
    TorusPoint() = default;
    /// Requires 0 <= value < 1.
    explicit TorusPoint(Rational value);
    /// Reduces an arbitrary rational mod 1.
    static TorusPoint wrap(const Rational& value);

    const Rational& value() const noexcept { return value_; }

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

private:
    Rational value_{0};
};

/// An open arc of R/Z with rational endpoints. Non-wrapping arcs are (left, right)
/// with 0 <= left < right <= 1. Wrapping arcs are (left, 1) u [0, right) with
/// 0 < right < left < 1, i.e. the arc running from left through 0 to right.
class TorusInterval {
public:
    static TorusInterval open(Rational left, Rational right);
    static TorusInterval wrapping(Rational left, Rational right);
    /// The arc (start, start + length) read mod 1; length in (0, 1).
    static TorusInterval arc(const Rational& start, const Rational& length);

    const Rational& left() const noexcept { return left_; }
    const Rational& right() const noexcept { return right_; }
    bool wraps() const noexcept { return wraps_; }

    Rational length() const;
    bool contains(const TorusPoint& x) const;
    bool contains(const Rational& x) const { return contains(TorusPoint::wrap(x)); }
    /// Arc start (left endpoint) as a lift in [0, 1); the arc is (start, start + length).
    const Rational& start() const noexcept { return left_; }
    /// Exact test that `inner` is a subset of this arc.
    bool contains(const TorusInterval& inner) const;
    /// Circular distance from x to the nearest endpoint (0 when x is an endpoint).
    Rational boundary_distance(const TorusPoint& x) const;
    Rational midpoint() const;

    friend bool operator==(const TorusInterval&, const TorusInterval&) = default;

private:
    TorusInterval(Rational left, Rational right, bool wraps);

    Rational left_;
    Rational right_;
    bool wraps_ = false;
};

/// Fractional part of n * alpha.
TorusPoint mul_mod1(const BigInt& n, const TorusPoint& alpha);

/// The n arcs whose union is { alpha : n*alpha mod 1 in J }, in increasing
/// order of their start point. Each has length length(J)/n.
std::vector<TorusInterval> preimage_intervals(const BigInt& n, const TorusInterval& J);

/// The single preimage component ((start(J) + j)/n, (start(J) + length(J) + j)/n).
TorusInterval preimage_component(const BigInt& n, const TorusInterval& J, const BigInt& j);

Rational interval_length(const TorusInterval& interval);

/// A strictly increasing sequence of positive integers, either an explicit
/// finite list or a formula evaluated on demand. Terms are indexed from 0.
class IndexSequence {
public:
    using Formula = std::function<BigInt(std::uint64_t)>;

    static IndexSequence explicit_terms(std::vector<BigInt> terms);
    static IndexSequence from_formula(std::string name, Formula formula);
    /// base^k
    static IndexSequence powers(std::uint64_t base);
    /// base^(k*k)
    static IndexSequence power_squares(std::uint64_t base);
    /// base^k + 1
    static IndexSequence powers_plus_one(std::uint64_t base);
    /// Parses "pow:B", "powsq:B", "powp1:B" or "list:a,b,c".
    static IndexSequence parse(const std::string& description);

    BigInt term(std::uint64_t k) const;
    BigInt operator[](std::uint64_t k) const { return term(k); }
    /// Number of terms for explicit lists; nullopt for formulas.
    std::optional<std::uint64_t> size() const;
    const std::string& name() const noexcept { return name_; }

    /// Throws std::invalid_argument naming the first k in [from, to) with
    /// term(k+1) <= term(k) or term(k) < 1.
    void check_increasing(std::uint64_t from, std::uint64_t to) const;

private:
    IndexSequence(std::string name, Formula formula, std::optional<std::uint64_t> size);

    std::string name_;
    Formula formula_;
    std::optional<std::uint64_t> size_;
};

} // namespace udist
