#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ruin2d/rng.hpp"

using ruin2d::Philox4x32;
using ruin2d::Stream;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
    const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Stream, SameSeedAndIdReplays) {
    Stream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Stream, DistinctIdsAndSeedsDiffer) {
    Stream a(42, 7), b(42, 8), c(43, 7);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        same_ab += x == b();
        same_ac += x == c();
    }
    EXPECT_EQ(same_ab, 0);
    EXPECT_EQ(same_ac, 0);
}

TEST(Stream, UniformStaysInOpenInterval) {
    Stream s(1, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Stream, UniformExtremesAreRepresentable) {
    // Largest possible uniform stays strictly below 1 after rounding.
    const double top = (static_cast<double>((~0ull) >> 12) + 0.5) * 0x1.0p-52;
    EXPECT_LT(top, 1.0);
    EXPECT_GT(0.5 * 0x1.0p-52, 0.0);
}

TEST(Stream, WorksWithStandardDistributions) {
    static_assert(std::uniform_random_bit_generator<Stream>);
    Stream s(3, 3);
    std::uniform_int_distribution<int> die(1, 6);
    std::set<int> seen;
    for (int i = 0; i < 200; ++i) seen.insert(die(s));
    EXPECT_EQ(seen.size(), 6u);
}

TEST(Stream, NormalMoments) {
    Stream s(11, 0);
    constexpr int n = 200000;
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m += z;
        m2 += z * z;
    }
    m /= n;
    m2 /= n;
    EXPECT_NEAR(m, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
}
