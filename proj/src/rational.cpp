#include "udist/rational.hpp"

#include <cctype>
#include <iomanip>
#include <sstream>

namespace udist {

RationalParseError::RationalParseError(std::string message, std::size_t position)
    : std::invalid_argument(message + " at position " + std::to_string(position)),
      position_(position) {}

Rational make_rational(const BigInt& numerator, const BigInt& denominator) {
    if (denominator == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    Rational r(numerator, denominator);
    r.canonicalize();
    return r;
}

Rational make_rational(std::int64_t numerator, std::int64_t denominator) {
    return make_rational(BigInt(static_cast<long>(numerator)), BigInt(static_cast<long>(denominator)));
}

namespace {

// Parses an optionally signed run of decimal digits starting at `pos`.
BigInt parse_digits(std::string_view text, std::size_t& pos, bool allow_sign) {
    const std::size_t start = pos;
    bool negative = false;
    if (allow_sign && pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    const std::size_t digits_start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos;
    }
    if (pos == digits_start) {
        throw RationalParseError("expected digit", pos < text.size() ? pos : start);
    }
    BigInt value(std::string(text.substr(digits_start, pos - digits_start)), 10);
    return negative ? BigInt(-value) : value;
}

} // namespace

Rational parse_rational(std::string_view text) {
    if (text.empty()) {
        throw RationalParseError("empty rational", 0);
    }
    std::size_t pos = 0;
    const bool negative = text[0] == '-';
    BigInt whole = parse_digits(text, pos, true);
    if (pos == text.size()) {
        return Rational(whole);
    }
    if (text[pos] == '/') {
        ++pos;
        BigInt den = parse_digits(text, pos, false);
        if (pos != text.size()) {
            throw RationalParseError("trailing characters", pos);
        }
        if (den == 0) {
            throw RationalParseError("zero denominator", pos - 1);
        }
        return make_rational(whole, den);
    }
    if (text[pos] == '.') {
        ++pos;
        const std::size_t frac_start = pos;
        BigInt frac_digits = parse_digits(text, pos, false);
        if (pos != text.size()) {
            throw RationalParseError("trailing characters", pos);
        }
        BigInt scale = pow(BigInt(10), static_cast<unsigned long>(pos - frac_start));
        BigInt magnitude = abs(whole) * scale + frac_digits;
        return make_rational(negative ? BigInt(-magnitude) : magnitude, scale);
    }
    throw RationalParseError("unexpected character", pos);
}

BigInt parse_bigint(std::string_view text) {
    std::size_t pos = 0;
    BigInt value = parse_digits(text, pos, true);
    if (pos != text.size()) {
        throw RationalParseError("trailing characters", pos);
    }
    return value;
}

std::string to_string(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_string(const BigInt& value) { return value.get_str(); }

std::string to_decimal(const Rational& value, int digits) {
    if (digits < 0) {
        digits = 0;
    }
    BigInt scale = pow(BigInt(10), static_cast<unsigned long>(digits));
    Rational scaled = abs(value) * scale;
    // round half away from zero
    BigInt rounded = floor(scaled + Rational(1, 2));
    std::string body = rounded.get_str();
    if (digits > 0) {
        if (body.size() <= static_cast<std::size_t>(digits)) {
            body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
        }
        body.insert(body.size() - static_cast<std::size_t>(digits), ".");
    }
    if (value < 0 && rounded != 0) {
        body.insert(0, "-");
    }
    return body;
}

BigInt floor(const Rational& value) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return q;
}

BigInt ceil(const Rational& value) {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return q;
}

Rational frac(const Rational& value) {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return make_rational(r, value.get_den());
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

Rational pow(const Rational& base, unsigned long exponent) {
    BigInt num;
    BigInt den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
    return make_rational(num, den);
}

BigInt pow(const BigInt& base, unsigned long exponent) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
    return out;
}

bool is_dyadic(const Rational& value) {
    const BigInt& den = value.get_den();
    return mpz_popcount(den.get_mpz_t()) == 1;
}

} // namespace udist
