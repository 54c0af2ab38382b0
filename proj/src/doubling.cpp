#include "udist/doubling.hpp"

#include <algorithm>

namespace udist {

namespace {

Rational ratio_u64(std::uint64_t num, std::uint64_t den) {
    return make_rational(BigInt(static_cast<unsigned long>(num)), BigInt(static_cast<unsigned long>(den)));
}

BigInt power_of_two(std::size_t exponent) {
    BigInt r = 1;
    r <<= static_cast<mp_bitcnt_t>(exponent);
    return r;
}

/// T^k of the stored value, as an integer over 2^L.
BigInt shifted_numerator(const BigInt& numerator, std::size_t length, std::size_t k) {
    BigInt shifted = numerator << static_cast<mp_bitcnt_t>(k);
    BigInt modulus = power_of_two(length);
    mpz_fdiv_r(shifted.get_mpz_t(), shifted.get_mpz_t(), modulus.get_mpz_t());
    return shifted;
}

} // namespace

BinaryPoint::BinaryPoint(std::vector<std::uint8_t> digits) : digits_(std::move(digits)), numerator_(0) {
    if (digits_.empty()) {
        throw std::invalid_argument("binary point needs at least one digit");
    }
    for (auto d : digits_) {
        if (d > 1) {
            throw std::invalid_argument("binary digits must be 0 or 1");
        }
        numerator_ <<= 1;
        numerator_ += d;
    }
}

BinaryPoint BinaryPoint::from_rational(const Rational& x, std::size_t length) {
    if (x < 0 || x >= 1) {
        throw std::invalid_argument("binary expansion needs 0 <= x < 1");
    }
    std::vector<std::uint8_t> digits;
    digits.reserve(length);
    Rational r = x;
    for (std::size_t j = 0; j < length; ++j) {
        r *= 2;
        if (r >= 1) {
            digits.push_back(1);
            r -= 1;
        } else {
            digits.push_back(0);
        }
    }
    return BinaryPoint(std::move(digits));
}

BinaryPoint BinaryPoint::parse(const std::string& text) {
    std::string_view body = text;
    if (body.starts_with("0.")) {
        body.remove_prefix(2);
    }
    std::vector<std::uint8_t> digits;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '0' && body[i] != '1') {
            throw RationalParseError("expected binary digit", i + (text.size() - body.size()));
        }
        digits.push_back(static_cast<std::uint8_t>(body[i] - '0'));
    }
    return BinaryPoint(std::move(digits));
}

Rational BinaryPoint::value() const { return make_rational(numerator_, power_of_two(digits_.size())); }

TorusPoint BinaryPoint::shift(std::size_t k) const {
    if (k >= digits_.size()) {
        throw DigitExhaustion("shift by " + std::to_string(k) + " needs more than the " +
                              std::to_string(digits_.size()) + " stored digits");
    }
    return TorusPoint(make_rational(shifted_numerator(numerator_, digits_.size(), k), power_of_two(digits_.size())));
}

std::string BinaryPoint::to_string() const {
    std::string out = "0.";
    for (auto d : digits_) {
        out.push_back(static_cast<char>('0' + d));
    }
    return out;
}

std::vector<TorusPoint> doubling_orbit(const BinaryPoint& alpha, std::size_t count) {
    if (count >= alpha.length()) {
        throw DigitExhaustion("orbit of length " + std::to_string(count) + " needs more than " +
                              std::to_string(alpha.length()) + " digits");
    }
    std::vector<TorusPoint> out;
    out.reserve(count);
    for (std::size_t k = 1; k <= count; ++k) {
        out.push_back(alpha.shift(k));
    }
    return out;
}

std::vector<TorusPoint> doubling_orbit(const TorusPoint& alpha, std::size_t count) {
    std::vector<TorusPoint> out;
    out.reserve(count);
    Rational x = alpha.value();
    for (std::size_t k = 1; k <= count; ++k) {
        x *= 2;
        if (x >= 1) {
            x -= 1;
        }
        out.emplace_back(x);
    }
    return out;
}

OrbitPeriod orbit_period(const Rational& alpha, std::uint64_t max_period) {
    BigInt den = alpha.get_den();
    OrbitPeriod p;
    while (mpz_even_p(den.get_mpz_t())) {
        den >>= 1;
        ++p.preperiod;
    }
    if (den == 1) {
        return p;
    }
    BigInt power = 2 % den;
    p.period = 1;
    while (power != 1) {
        power = (power * 2) % den;
        if (++p.period > max_period) {
            throw std::invalid_argument("orbit period exceeds " + std::to_string(max_period));
        }
    }
    return p;
}

Rational invariance_defect(std::span<const TorusPoint> points, const CellPartition& partition) {
    if (!partition.is_dyadic()) {
        throw PartitionError("invariance defect needs a dyadic partition (cut points k / 2^L)");
    }
    if (points.empty()) {
        throw std::invalid_argument("invariance defect of an empty segment");
    }
    std::vector<std::int64_t> balance(partition.size(), 0);
    for (const auto& x : points) {
        ++balance[partition.cell_of(x)];
        Rational image = x.value() * 2;
        if (image >= 1) {
            image -= 1;
        }
        --balance[partition.cell_of(image)];
    }
    std::int64_t worst = 0;
    for (auto b : balance) {
        worst = std::max(worst, b < 0 ? -b : b);
    }
    return ratio_u64(static_cast<std::uint64_t>(worst), points.size());
}

FiveSixthReport five_sixth_check(const Rational& alpha, std::uint64_t horizon) {
    if (alpha <= 0 || alpha >= make_rational(1, 16)) {
        throw std::invalid_argument("five_sixth_check needs 0 < alpha < 1/16, got " + udist::to_string(alpha));
    }
    if (horizon == 0) {
        throw std::invalid_argument("five_sixth_check needs K >= 1");
    }
    const Rational half = make_rational(1, 2);
    const Rational three_quarters = make_rational(3, 4);
    FiveSixthReport report;
    report.target = TorusInterval::open(half - alpha / 3, three_quarters + alpha / 3);
    const Rational lo = half - 4 * alpha / 3;
    const Rational hi = three_quarters - 2 * alpha / 3;
    report.shifted = TorusInterval::open(lo, hi);
    // T(I^-) = (1 - 8a/3, 1) u {0}, T^2(I^-) = (1 - 16a/3, 1) u {0}, T(I^+) = (0, 1/2 - 4a/3).
    report.t_minus_disjoint = 1 - 8 * alpha / 3 >= hi;
    report.t2_minus_disjoint = 1 - 16 * alpha / 3 >= hi;
    report.t_plus_disjoint = half - 4 * alpha / 3 <= lo;

    Rational power_alpha = alpha;  // 2^k alpha mod 1
    report.counts_agree = true;
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        power_alpha *= 2;
        if (power_alpha >= 1) {
            power_alpha -= 1;
        }
        const bool direct = report.target.contains(power_alpha + alpha);
        const bool minus = power_alpha > lo && power_alpha <= half;
        const bool plus = power_alpha > half && power_alpha < hi;
        report.counts_agree = report.counts_agree && direct == (minus || plus);
        report.minus_hits += minus ? 1 : 0;
        report.plus_hits += plus ? 1 : 0;
        report.orbit.hits += direct ? 1 : 0;
    }
    report.orbit.horizon = horizon;
    report.orbit.density = ratio_u64(report.orbit.hits, horizon);
    report.orbit.windows.push_back({horizon, report.orbit.hits, report.orbit.density});
    report.bound = make_rational(5, 6) + ratio_u64(3, horizon);
    report.holds = report.orbit.density <= report.bound;
    return report;
}

OrbitHitReport zero_block_density(const BinaryPoint& alpha, std::span<const std::uint64_t> window_ends) {
    if (window_ends.empty()) {
        throw std::invalid_argument("zero_block_density needs at least one window");
    }
    for (std::size_t i = 0; i < window_ends.size(); ++i) {
        if (window_ends[i] == 0 || (i > 0 && window_ends[i] <= window_ends[i - 1])) {
            throw std::invalid_argument("window ends must be positive and increasing");
        }
    }
    const std::size_t L = alpha.length();
    if (window_ends.back() > L) {
        throw DigitExhaustion("window end " + std::to_string(window_ends.back()) + " beyond the " +
                              std::to_string(L) + " stored digits");
    }
    const Rational a = alpha.value();
    if (a <= make_rational(1, 2) || a >= make_rational(3, 4)) {
        throw std::invalid_argument("zero_block_density needs alpha in (1/2, 3/4)");
    }
    // Work with integers over 2^L: T^k alpha + alpha mod 1 lies in (1/2, 3/4)
    // iff its numerator lies strictly between 2^(L-1) and 3 * 2^(L-2).
    BigInt numerator = a.get_num() * (power_of_two(L) / a.get_den());
    const BigInt modulus = power_of_two(L);
    const BigInt low = power_of_two(L - 1);
    const BigInt high = 3 * power_of_two(L) / 4;
    OrbitHitReport report;
    std::size_t next = 0;
    BigInt shifted = numerator;
    for (std::uint64_t k = 0; k < window_ends.back(); ++k) {
        BigInt sum = shifted + numerator;
        if (sum >= modulus) {
            sum -= modulus;
        }
        if (sum > low && sum < high) {
            ++report.hits;
        }
        shifted <<= 1;
        if (shifted >= modulus) {
            shifted -= modulus;
        }
        if (k + 1 == window_ends[next]) {
            report.windows.push_back({k + 1, report.hits, ratio_u64(report.hits, k + 1)});
            ++next;
        }
    }
    report.horizon = window_ends.back();
    report.density = report.windows.back().density;
    return report;
}

} // namespace udist
