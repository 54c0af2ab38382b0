#include "udist/doubling.hpp"
#include "udist/rng.hpp"

#include <gtest/gtest.h>

using namespace udist;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return make_rational(p, d); }

std::vector<Rational> values(const std::vector<TorusPoint>& pts) {
    std::vector<Rational> out;
    for (const auto& p : pts) {
        out.push_back(p.value());
    }
    return out;
}

// Multiplicative order of 2 mod m by repeated doubling.
std::uint64_t order_of_two(std::uint64_t m) {
    if (m == 1) {
        return 1;
    }
    std::uint64_t x = 2 % m, k = 1;
    while (x != 1) {
        x = x * 2 % m;
        ++k;
    }
    return k;
}

} // namespace

TEST(BinaryPoint, ParseValueAndShift) {
    auto a = BinaryPoint::parse("0.1011");
    EXPECT_EQ(a.value(), q(11, 16));
    EXPECT_EQ(a.to_string(), "0.1011");
    EXPECT_EQ(values(doubling_orbit(a, 3)), (std::vector<Rational>{q(3, 8), q(3, 4), q(1, 2)}));
    EXPECT_THROW(a.shift(4), DigitExhaustion);
    EXPECT_THROW(doubling_orbit(a, 4), DigitExhaustion);
    EXPECT_EQ(BinaryPoint::from_rational(q(1, 3), 6).to_string(), "0.010101");
    EXPECT_THROW(BinaryPoint::parse("0.12"), std::invalid_argument);
}

TEST(DoublingOrbit, RationalExamples) {
    EXPECT_EQ(values(doubling_orbit(TorusPoint(q(1, 3)), 4)), (std::vector<Rational>{q(2, 3), q(1, 3), q(2, 3), q(1, 3)}));
    auto orbit = doubling_orbit(TorusPoint(q(1, 17)), 8);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_EQ(orbit[k], mul_mod1(pow(BigInt(2), k + 1), TorusPoint(q(1, 17))));
    }
    EXPECT_EQ(orbit.back().value(), q(1, 17));
}

TEST(DoublingOrbit, DigitShiftsAgreeWithRationalDoubling) {
    SplitMix64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = q(static_cast<std::int64_t>(rng.below(1000)), 1 + static_cast<std::int64_t>(rng.below(1000)));
        x = frac(x);
        auto digits = BinaryPoint::from_rational(x, 40);
        auto exact = doubling_orbit(TorusPoint(x), 20);
        auto shifted = doubling_orbit(digits, 20);
        for (std::size_t k = 0; k < 20; ++k) {
            // The truncated expansion is within 2^-(40-k-1) of the exact point.
            EXPECT_LE(exact[k].value() - shifted[k].value(), pow(Rational(q(1, 2)), 40 - k - 1));
            EXPECT_GE(exact[k].value(), shifted[k].value());
        }
    }
}

TEST(OrbitPeriod, MatchesMultiplicativeOrder) {
    for (std::uint64_t d : {3u, 5u, 7u, 17u, 25u, 100u, 257u, 96u, 1u}) {
        auto p = orbit_period(q(1, static_cast<std::int64_t>(d)));
        std::uint64_t odd = d, two = 0;
        while (odd % 2 == 0) {
            odd /= 2;
            ++two;
        }
        EXPECT_EQ(p.preperiod, two);
        EXPECT_EQ(p.period, order_of_two(odd));
        // The orbit repeats after the preperiod with exactly this period.
        if (p.period > 0) {
            auto orbit = doubling_orbit(TorusPoint(frac(q(1, static_cast<std::int64_t>(d)))), p.preperiod + 2 * p.period);
            EXPECT_EQ(orbit[p.preperiod + p.period - 1], orbit[p.preperiod + 2 * p.period - 1]);
        }
    }
}

TEST(InvarianceDefect, FullPeriodsAreExactlyInvariant) {
    EXPECT_EQ(invariance_defect(doubling_orbit(TorusPoint(q(1, 3)), 2), CellPartition::uniform(2)), 0);
    EXPECT_EQ(invariance_defect(doubling_orbit(TorusPoint(q(1, 17)), 8), CellPartition::dyadic(3)), 0);
    for (std::int64_t d : {3, 5, 7, 9, 11, 13, 17, 31, 257}) {
        auto period = orbit_period(q(1, d)).period;
        auto orbit = doubling_orbit(TorusPoint(q(1, d)), period);
        for (unsigned level = 1; level <= 6; ++level) {
            EXPECT_EQ(invariance_defect(orbit, CellPartition::dyadic(level)), 0) << d << " " << level;
        }
    }
}

TEST(InvarianceDefect, TruncatedPeriodsStayWithinTwoOverK) {
    for (std::int64_t d : {3, 17, 257}) {
        auto period = orbit_period(q(1, d)).period;
        auto K = period - 1;
        auto orbit = doubling_orbit(TorusPoint(q(1, d)), K);
        for (unsigned level = 1; level <= 6; ++level) {
            EXPECT_LE(invariance_defect(orbit, CellPartition::dyadic(level)), q(2, static_cast<std::int64_t>(K)));
        }
    }
}

TEST(InvarianceDefect, RefusesNonDyadicPartitions) {
    EXPECT_THROW(invariance_defect(doubling_orbit(TorusPoint(q(1, 3)), 2), CellPartition::uniform(3)), PartitionError);
}

TEST(FiveSixth, ShiftedOrbitIdentity) {
    for (auto alpha : {q(1, 17), q(1, 33), q(1, 100), q(3, 64)}) {
        auto orbit = doubling_orbit(TorusPoint(alpha), 60);
        for (std::size_t k = 1; k <= 60; ++k) {
            EXPECT_EQ(mul_mod1(pow(BigInt(2), k) + 1, TorusPoint(alpha)), TorusPoint::wrap(orbit[k - 1].value() + alpha));
        }
    }
}

TEST(FiveSixth, DensityBoundOnExamples) {
    auto r17 = five_sixth_check(q(1, 17), 8);
    EXPECT_TRUE(r17.counts_agree);
    EXPECT_TRUE(r17.holds);
    EXPECT_LE(r17.orbit.density, q(5, 6));
    EXPECT_EQ(r17.target, TorusInterval::open(q(1, 2) - q(1, 51), q(3, 4) + q(1, 51)));
    EXPECT_TRUE(r17.t_plus_disjoint);

    auto p100 = orbit_period(q(1, 100));
    auto K = p100.preperiod + p100.period;
    auto r100 = five_sixth_check(q(1, 100), K);
    EXPECT_TRUE(r100.holds);
    EXPECT_LE(r100.orbit.density, q(5, 6) + q(3, static_cast<std::int64_t>(K)));

    EXPECT_THROW(five_sixth_check(q(1, 10), 8), std::invalid_argument);
    EXPECT_THROW(five_sixth_check(q(1, 16), 8), std::invalid_argument);
}

TEST(FiveSixth, BoundHoldsAcrossAlphaAndHorizon) {
    SplitMix64 rng(62);
    for (int trial = 0; trial < 150; ++trial) {
        auto den = 17 + static_cast<std::int64_t>(rng.below(500));
        auto num = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den / 16)));
        auto alpha = q(num, den);
        if (alpha >= q(1, 16)) {
            continue;
        }
        auto K = 1 + rng.below(300);
        auto r = five_sixth_check(alpha, K);
        EXPECT_TRUE(r.counts_agree);
        EXPECT_EQ(r.orbit.hits, r.minus_hits + r.plus_hits);
        // Independent recount of (2^k + 1) alpha in I'.
        std::uint64_t hits = 0;
        for (std::uint64_t k = 1; k <= K; ++k) {
            hits += r.target.contains(mul_mod1(pow(BigInt(2), k) + 1, TorusPoint(alpha)));
        }
        EXPECT_EQ(hits, r.orbit.hits);
        EXPECT_TRUE(r.holds) << to_string(alpha) << " K " << K;
        if (alpha <= q(3, 56)) {
            EXPECT_TRUE(r.t2_minus_disjoint);
        }
    }
}

TEST(ZeroBlockDensity, SingleLongBlock) {
    // 0.10 followed by zeros from position 10 to 100.
    std::string digits = "0.10";
    for (int j = 3; j <= 100; ++j) {
        digits += (j >= 10 ? '0' : (j % 2 ? '1' : '0'));
    }
    auto a = BinaryPoint::parse(digits);
    std::vector<std::uint64_t> window{100};
    auto r = zero_block_density(a, window);
    EXPECT_GE(r.windows[0].density, q(9, 10));
    // Independent recount via exact rationals.
    std::uint64_t hits = 0;
    auto target = TorusInterval::open(q(1, 2), q(3, 4));
    for (std::uint64_t k = 0; k < 100; ++k) {
        hits += target.contains(TorusPoint::wrap((k == 0 ? a.value() : a.shift(k).value()) + a.value()));
    }
    EXPECT_EQ(hits, r.windows[0].hits);
}

TEST(ZeroBlockDensity, NoBlocksAndShortBlock) {
    // 0.1010... = 2/3 truncated: T^k alpha + alpha alternates around 1/3 + 2/3 and 2/3 + 2/3.
    auto periodic = BinaryPoint::from_rational(q(2, 3), 64);
    std::vector<std::uint64_t> window{60};
    EXPECT_LE(zero_block_density(periodic, window).windows[0].density, q(1, 2));
    auto shortblock = BinaryPoint::parse("0.10001");
    std::vector<std::uint64_t> four{4};
    EXPECT_GE(zero_block_density(shortblock, four).windows[0].density, q(1, 2));
    EXPECT_THROW(zero_block_density(shortblock, std::vector<std::uint64_t>{6}), DigitExhaustion);
}
