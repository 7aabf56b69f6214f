#include "cutstack/exact.hpp"
#include "cutstack/rng.hpp"

#include <gtest/gtest.h>

using namespace cutstack;

TEST(Exact, ParseAndPrint) {
  EXPECT_EQ(parse_bigint("123456789012345678901234567890").get_str(), "123456789012345678901234567890");
  EXPECT_EQ(parse_bigint("-7"), -7);
  EXPECT_THROW(parse_bigint(""), domain_error);
  EXPECT_THROW(parse_bigint("12a"), domain_error);
  EXPECT_EQ(to_fraction_string(parse_rational("42/100")), "21/50");
  EXPECT_EQ(to_fraction_string(parse_rational("5")), "5");
  EXPECT_THROW(parse_rational("1/0"), domain_error);
}

TEST(Exact, U64RoundTrip) {
  for (std::uint64_t v : {std::uint64_t{0}, std::uint64_t{1}, std::uint64_t{1} << 40, ~std::uint64_t{0}}) {
    EXPECT_TRUE(fits_u64(big(v)));
    EXPECT_EQ(to_u64(big(v)), v);
  }
  EXPECT_FALSE(fits_u64(big(~std::uint64_t{0}) + 1));
  EXPECT_FALSE(fits_u64(BigInt(-1)));
}

TEST(Exact, RootsAgainstBruteForce) {
  for (unsigned k = 2; k <= 5; ++k)
    for (long x = 0; x <= 3000; x += 7) {
      long f = 0;
      while (pow(BigInt(f + 1), k) <= x) ++f;
      EXPECT_EQ(floor_root(BigInt(x), k), f);
      EXPECT_EQ(ceil_root(BigInt(x), k), pow(BigInt(f), k) == x ? f : f + 1);
    }
}

TEST(Exact, ComparePowMatchesIntegerPowers) {
  // 32^(1/5) = 2 exactly.
  EXPECT_EQ(compare_pow(Rational(32), Rational(1, 5), Rational(2)), 0);
  EXPECT_EQ(compare_pow(Rational(33), Rational(1, 5), Rational(2)), 1);
  EXPECT_EQ(compare_pow(Rational(31), Rational(1, 5), Rational(2)), -1);
  // (9/4)^(3/2) = 27/8
  EXPECT_EQ(compare_pow(Rational(9, 4), Rational(3, 2), Rational(27, 8)), 0);
  EXPECT_EQ(compare_pow2(Rational(4), Rational(1, 2), Rational(8), Rational(1, 3)), 0);
  EXPECT_EQ(compare_pow2(Rational(5), Rational(1, 2), Rational(8), Rational(1, 3)), 1);
  EXPECT_THROW(compare_pow(Rational(0), Rational(1), Rational(1)), domain_error);
}

TEST(Exact, CeilFloorPowBracketTheRealPower) {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    Rational x(uniform_between(rng, 1, 100000), uniform_between(rng, 1, 50));
    Rational e(uniform_between(rng, 1, 30), uniform_between(rng, 1, 30));
    x.canonicalize();
    e.canonicalize();
    BigInt c = ceil_pow(x, e), f = floor_pow(x, e), fs = floor_pow_strict(x, e);
    // c is the least integer >= x^e, f the greatest <= x^e.
    if (sgn(c) > 0) {
      EXPECT_LE(compare_pow(x, e, Rational(c)), 0);
    }
    if (c - 1 > 0) {
      EXPECT_GT(compare_pow(x, e, Rational(c - 1)), 0);
    }
    if (sgn(f) > 0) {
      EXPECT_GE(compare_pow(x, e, Rational(f)), 0);
    }
    EXPECT_LT(compare_pow(x, e, Rational(f + 1)), 0);
    EXPECT_TRUE(fs == f || fs == f - 1);
  }
}

TEST(Exact, DecimalHalfEven) {
  EXPECT_EQ(to_decimal(Rational(1, 2), 0), "0");
  EXPECT_EQ(to_decimal(Rational(3, 2), 0), "2");
  EXPECT_EQ(to_decimal(Rational(1, 3)), "0.333333");
  EXPECT_EQ(to_decimal(Rational(2, 3)), "0.666667");
  EXPECT_EQ(to_decimal(Rational(1, 100)), "0.010000");
  EXPECT_EQ(to_decimal(Rational(5, 10000000)), "0.000000");   // tie, even stays
  EXPECT_EQ(to_decimal(Rational(15, 10000000)), "0.000002");  // tie, odd rounds up
  EXPECT_EQ(to_decimal(Rational(-1, 3)), "-0.333333");
  EXPECT_EQ(to_decimal(Rational(1)), "1.000000");
}

TEST(Rng, UniformBelowIsDeterministicAndInRange) {
  Rng a(11), b(11);
  for (int i = 0; i < 1000; ++i) {
    auto x = uniform_below(a, std::uint64_t{37});
    EXPECT_EQ(x, uniform_below(b, std::uint64_t{37}));
    EXPECT_LT(x, 37u);
  }
  BigInt bound = pow(BigInt(10), 40) + 3;
  for (int i = 0; i < 200; ++i) {
    BigInt x = uniform_below(a, bound);
    EXPECT_GE(x, 0);
    EXPECT_LT(x, bound);
  }
  EXPECT_THROW(uniform_below(a, std::uint64_t{0}), domain_error);
}

TEST(Rng, StreamsDiffer) {
  Rng s0 = make_stream(1, 0), s1 = make_stream(1, 1);
  EXPECT_NE(s0(), s1());
}
