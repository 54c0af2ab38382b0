#include "udist/rng.hpp"
#include "udist/torus.hpp"

#include <gtest/gtest.h>

using namespace udist;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return make_rational(p, d); }

Rational random_unit(SplitMix64& rng, std::uint64_t den) {
    return make_rational(static_cast<std::int64_t>(rng.below(den)), static_cast<std::int64_t>(den));
}

} // namespace

TEST(TorusPoint, RejectsValuesOutsideUnitInterval) {
    EXPECT_THROW(TorusPoint(Rational(1)), std::invalid_argument);
    EXPECT_THROW(TorusPoint(q(-1, 3)), std::invalid_argument);
    EXPECT_EQ(TorusPoint::wrap(q(7, 3)).value(), q(1, 3));
    EXPECT_EQ(TorusPoint::wrap(q(-1, 3)).value(), q(2, 3));
}

TEST(TorusInterval, OpenEndpointsAreExcluded) {
    auto I = TorusInterval::open(q(1, 4), q(1, 2));
    EXPECT_FALSE(I.contains(TorusPoint(q(1, 4))));
    EXPECT_FALSE(I.contains(TorusPoint(q(1, 2))));
    EXPECT_TRUE(I.contains(TorusPoint(q(1, 3))));
    EXPECT_EQ(I.length(), q(1, 4));
    EXPECT_EQ(I.midpoint(), q(3, 8));
}

TEST(TorusInterval, WrappingArcRunsThroughZero) {
    auto I = TorusInterval::arc(q(7, 8), q(1, 4));
    EXPECT_TRUE(I.wraps());
    EXPECT_EQ(I.right(), q(1, 8));
    EXPECT_TRUE(I.contains(TorusPoint(Rational(0))));
    EXPECT_TRUE(I.contains(TorusPoint(q(15, 16))));
    EXPECT_FALSE(I.contains(TorusPoint(q(1, 8))));
    EXPECT_FALSE(I.contains(TorusPoint(q(1, 2))));
    EXPECT_EQ(I.midpoint(), Rational(0));
    EXPECT_THROW(TorusInterval::wrapping(q(1, 4), q(1, 2)), std::invalid_argument);
    EXPECT_THROW(TorusInterval::arc(0, 1), std::invalid_argument);
}

TEST(TorusInterval, ArcContainmentMatchesPointSampling) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto outer = TorusInterval::arc(random_unit(rng, 64), q(1 + rng.below(60), 64));
        auto inner = TorusInterval::arc(random_unit(rng, 64), q(1 + rng.below(30), 64));
        // Endpoints sit on the 1/64 grid, so any failure of containment
        // shows up at the midpoint of some grid cell.
        bool sampled = true;
        for (int k = 1; k < 128; k += 2) {
            TorusPoint x(q(k, 128));
            sampled = sampled && (!inner.contains(x) || outer.contains(x));
        }
        EXPECT_EQ(outer.contains(inner), sampled);
    }
}

TEST(MulMod1, MatchesDirectReduction) {
    SplitMix64 rng(5);
    for (int i = 0; i < 300; ++i) {
        TorusPoint a(random_unit(rng, 1 + rng.below(1000)));
        BigInt n = BigInt(static_cast<unsigned long>(1 + rng.below(100000)));
        EXPECT_EQ(mul_mod1(n, a).value(), frac(Rational(n) * a.value()));
    }
    EXPECT_EQ(mul_mod1(pow(BigInt(10), 30), TorusPoint(q(1, 3))).value(), q(1, 3));
    EXPECT_EQ(mul_mod1(3, TorusPoint(q(1, 3))).value(), 0);
    EXPECT_EQ(mul_mod1(2, TorusPoint(q(2, 3))).value(), q(1, 3));
    // 2^8 = 256 = 15 * 17 + 1
    EXPECT_EQ(mul_mod1(256, TorusPoint(q(1, 17))).value(), q(1, 17));
}

TEST(MulMod1, SemigroupProperty) {
    SplitMix64 rng(6);
    for (int i = 0; i < 300; ++i) {
        TorusPoint a(random_unit(rng, 1 + rng.below(5000)));
        BigInt x = BigInt(static_cast<unsigned long>(1 + rng.below(1u << 20)));
        BigInt y = BigInt(static_cast<unsigned long>(1 + rng.below(1u << 20)));
        EXPECT_EQ(mul_mod1(x * y, a), mul_mod1(x, mul_mod1(y, a)));
    }
}

TEST(Preimages, Examples) {
    auto id = preimage_intervals(1, TorusInterval::open(q(1, 5), q(1, 2)));
    ASSERT_EQ(id.size(), 1u);
    EXPECT_EQ(id[0], TorusInterval::open(q(1, 5), q(1, 2)));
    auto two = preimage_intervals(2, TorusInterval::open(0, q(1, 2)));
    EXPECT_EQ(two, (std::vector<TorusInterval>{TorusInterval::open(0, q(1, 4)),
                                                TorusInterval::open(q(1, 2), q(3, 4))}));
    auto three = preimage_intervals(3, TorusInterval::open(q(1, 3), q(2, 3)));
    EXPECT_EQ(three, (std::vector<TorusInterval>{TorusInterval::open(q(1, 9), q(2, 9)),
                                                  TorusInterval::open(q(4, 9), q(5, 9)),
                                                  TorusInterval::open(q(7, 9), q(8, 9))}));
    EXPECT_EQ(TorusInterval::open(q(1, 4), q(3, 4)).length(), q(1, 2));
    EXPECT_EQ(TorusInterval::wrapping(q(8, 10), q(1, 10)).length(), q(3, 10));
}

TEST(Preimages, PartitionTheInverseImageExactly) {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        BigInt n = BigInt(static_cast<unsigned long>(1 + rng.below(12)));
        auto J = TorusInterval::arc(random_unit(rng, 32), q(1 + rng.below(31), 32));
        auto parts = preimage_intervals(n, J);
        ASSERT_EQ(parts.size(), n.get_ui());
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            EXPECT_LT(parts[i].start(), parts[i + 1].start());
        }
        // Oracle: alpha is in some component iff n*alpha mod 1 lies in J.
        for (int k = 0; k < 97; ++k) {
            TorusPoint alpha(q(k, 97));
            bool in_union = false;
            for (const auto& P : parts) {
                EXPECT_EQ(P.length(), J.length() / Rational(n));
                in_union = in_union || P.contains(alpha);
            }
            EXPECT_EQ(in_union, J.contains(mul_mod1(n, alpha)));
        }
    }
}

TEST(IndexSequence, FamiliesAndNames) {
    auto p = IndexSequence::parse("pow:3");
    EXPECT_EQ(p[0], 1);
    EXPECT_EQ(p[4], 81);
    EXPECT_EQ(p.name(), "pow:3");
    auto s = IndexSequence::parse("powsq:2");
    EXPECT_EQ(s[3], 512);
    auto p1 = IndexSequence::parse("powp1:2");
    EXPECT_EQ(p1[0], 2);
    EXPECT_EQ(p1[5], 33);
    auto l = IndexSequence::parse("list:2,5,9");
    EXPECT_EQ(l.size(), 3u);
    EXPECT_EQ(l[2], 9);
    EXPECT_EQ(IndexSequence::parse(l.name()).name(), l.name());
    EXPECT_THROW(l[3], std::out_of_range);
    EXPECT_THROW(IndexSequence::parse("list:3,3"), std::invalid_argument);
    EXPECT_THROW(IndexSequence::parse("fib:2"), std::invalid_argument);
    EXPECT_THROW(IndexSequence::parse("pow:1"), std::invalid_argument);
}
