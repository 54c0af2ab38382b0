#include "udist/torus.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

namespace udist {

TorusPoint::TorusPoint(Rational value) : value_(std::move(value)) {
    if (value_ < 0 || value_ >= 1) {
        throw std::invalid_argument("TorusPoint outside [0, 1): " + to_string(value_));
    }
}

TorusPoint TorusPoint::wrap(const Rational& value) { return TorusPoint(frac(value)); }

TorusInterval::TorusInterval(Rational left, Rational right, bool wraps)
    : left_(std::move(left)), right_(std::move(right)), wraps_(wraps) {}

TorusInterval TorusInterval::open(Rational left, Rational right) {
    if (!(0 <= left && left < right && right <= 1)) {
        throw std::invalid_argument("open interval needs 0 <= left < right <= 1, got (" +
                                    to_string(left) + ", " + to_string(right) + ")");
    }
    return TorusInterval(std::move(left), std::move(right), false);
}

TorusInterval TorusInterval::wrapping(Rational left, Rational right) {
    if (!(0 < right && right < left && left < 1)) {
        throw std::invalid_argument("wrapping interval needs 0 < right < left < 1, got left " +
                                    to_string(left) + ", right " + to_string(right));
    }
    return TorusInterval(std::move(left), std::move(right), true);
}

TorusInterval TorusInterval::arc(const Rational& start, const Rational& length) {
    if (!(0 < length && length < 1)) {
        throw std::invalid_argument("arc length must lie in (0, 1), got " + to_string(length));
    }
    Rational s = frac(start);
    Rational end = s + length;
    if (end <= 1) {
        return open(s, end);
    }
    return wrapping(s, end - 1);
}

Rational TorusInterval::length() const {
    if (wraps_) {
        return (1 - left_) + right_;
    }
    return right_ - left_;
}

bool TorusInterval::contains(const TorusPoint& x) const {
    const Rational& v = x.value();
    if (wraps_) {
        return v > left_ || v < right_;
    }
    return left_ < v && v < right_;
}

bool TorusInterval::contains(const TorusInterval& inner) const {
    Rational offset = frac(inner.start() - start());
    return offset + inner.length() <= length();
}

namespace {

Rational circular_distance(const Rational& a, const Rational& b) {
    Rational d1 = frac(a - b);
    Rational d2 = frac(b - a);
    return d1 < d2 ? d1 : d2;
}

} // namespace

Rational TorusInterval::boundary_distance(const TorusPoint& x) const {
    Rational a = circular_distance(x.value(), left_);
    Rational b = circular_distance(x.value(), right_);
    return a < b ? a : b;
}

Rational TorusInterval::midpoint() const { return frac(start() + length() / 2); }

TorusPoint mul_mod1(const BigInt& n, const TorusPoint& alpha) {
    const Rational& a = alpha.value();
    BigInt num = n * a.get_num();
    BigInt rem;
    mpz_fdiv_r(rem.get_mpz_t(), num.get_mpz_t(), a.get_den_mpz_t());
    return TorusPoint(make_rational(rem, a.get_den()));
}

TorusInterval preimage_component(const BigInt& n, const TorusInterval& J, const BigInt& j) {
    if (n < 1) {
        throw std::invalid_argument("preimage_component: n must be >= 1");
    }
    Rational start = (J.start() + Rational(j)) / Rational(n);
    return TorusInterval::arc(start, J.length() / Rational(n));
}

std::vector<TorusInterval> preimage_intervals(const BigInt& n, const TorusInterval& J) {
    if (n < 1) {
        throw std::invalid_argument("preimage_intervals: n must be >= 1");
    }
    std::vector<TorusInterval> out;
    out.reserve(n.get_ui());
    for (BigInt j = 0; j < n; ++j) {
        out.push_back(preimage_component(n, J, j));
    }
    return out;
}

Rational interval_length(const TorusInterval& interval) { return interval.length(); }

IndexSequence::IndexSequence(std::string name, Formula formula, std::optional<std::uint64_t> size)
    : name_(std::move(name)), formula_(std::move(formula)), size_(size) {}

IndexSequence IndexSequence::explicit_terms(std::vector<BigInt> terms) {
    const auto count = static_cast<std::uint64_t>(terms.size());
    std::string name = "list:";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        name += (i ? "," : "") + terms[i].get_str();
    }
    auto shared = std::make_shared<const std::vector<BigInt>>(std::move(terms));
    IndexSequence seq(std::move(name), [shared](std::uint64_t k) { return (*shared)[k]; }, count);
    if (count > 0) {
        seq.check_increasing(0, count - 1);
    }
    return seq;
}

IndexSequence IndexSequence::from_formula(std::string name, Formula formula) {
    return IndexSequence(std::move(name), std::move(formula), std::nullopt);
}

IndexSequence IndexSequence::powers(std::uint64_t base) {
    if (base < 2) {
        throw std::invalid_argument("powers: base must be >= 2");
    }
    return from_formula("pow:" + std::to_string(base),
                        [base](std::uint64_t k) { return pow(BigInt(static_cast<unsigned long>(base)), k); });
}

IndexSequence IndexSequence::power_squares(std::uint64_t base) {
    if (base < 2) {
        throw std::invalid_argument("power_squares: base must be >= 2");
    }
    return from_formula("powsq:" + std::to_string(base), [base](std::uint64_t k) {
        return pow(BigInt(static_cast<unsigned long>(base)), k * k);
    });
}

IndexSequence IndexSequence::powers_plus_one(std::uint64_t base) {
    if (base < 2) {
        throw std::invalid_argument("powers_plus_one: base must be >= 2");
    }
    return from_formula("powp1:" + std::to_string(base), [base](std::uint64_t k) {
        return BigInt(pow(BigInt(static_cast<unsigned long>(base)), k) + 1);
    });
}

IndexSequence IndexSequence::parse(const std::string& description) {
    const auto colon = description.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("index sequence must look like kind:args, got '" + description + "'");
    }
    const std::string kind = description.substr(0, colon);
    const std::string args = description.substr(colon + 1);
    if (kind == "list") {
        std::vector<BigInt> terms;
        std::size_t pos = 0;
        while (pos <= args.size()) {
            auto comma = args.find(',', pos);
            if (comma == std::string::npos) {
                comma = args.size();
            }
            terms.push_back(parse_bigint(args.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        return explicit_terms(std::move(terms));
    }
    const BigInt base = parse_bigint(args);
    if (!base.fits_ulong_p()) {
        throw std::invalid_argument("index sequence base too large");
    }
    if (kind == "pow") {
        return powers(base.get_ui());
    }
    if (kind == "powsq") {
        return power_squares(base.get_ui());
    }
    if (kind == "powp1") {
        return powers_plus_one(base.get_ui());
    }
    throw std::invalid_argument("unknown index sequence kind '" + kind + "'");
}

BigInt IndexSequence::term(std::uint64_t k) const {
    if (size_ && k >= *size_) {
        throw std::out_of_range("index sequence " + name_ + " has no term " + std::to_string(k));
    }
    return formula_(k);
}

std::optional<std::uint64_t> IndexSequence::size() const { return size_; }

void IndexSequence::check_increasing(std::uint64_t from, std::uint64_t to) const {
    BigInt previous = term(from);
    if (previous < 1) {
        throw std::invalid_argument("index sequence term " + std::to_string(from) + " is not positive");
    }
    for (std::uint64_t k = from; k < to; ++k) {
        BigInt next = term(k + 1);
        if (next <= previous) {
            throw std::invalid_argument("index sequence not strictly increasing at k = " + std::to_string(k));
        }
        previous = std::move(next);
    }
}

} // namespace udist
