#pragma once

// Exact integers and rationals backed by GMP. Every Rational handed out by
// this library is canonical: lowest terms, positive denominator.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace udist {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Thrown by parse_rational; position is the 0-based offset of the first
/// offending character.
class RationalParseError : public std::invalid_argument {
public:
    RationalParseError(std::string message, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

Rational make_rational(const BigInt& numerator, const BigInt& denominator);
Rational make_rational(std::int64_t numerator, std::int64_t denominator = 1);

/// Accepts "p/q", "-p/q", "p" and plain decimals such as "0.125" or "-3.5".
/// Decimals are converted exactly (0.1 is 1/10, not a binary approximation).
Rational parse_rational(std::string_view text);
BigInt parse_bigint(std::string_view text);

/// Always "p/q", including "0/1" and "3/1", so the format is regular.
std::string to_string(const Rational& value);
std::string to_string(const BigInt& value);

/// Decimal rendering rounded half away from zero to `digits` places.
std::string to_decimal(const Rational& value, int digits);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);
/// value - floor(value), in [0, 1).
Rational frac(const Rational& value);
Rational abs(const Rational& value);
Rational pow(const Rational& base, unsigned long exponent);
BigInt pow(const BigInt& base, unsigned long exponent);

bool is_dyadic(const Rational& value);

} // namespace udist
