#include <gtest/gtest.h>

#include "fracvel/exact_scalar.hpp"

using namespace fracvel;

TEST(ExactScalar, DyadicValuesAreExact) {
  EXPECT_EQ(ExactScalar::dyadic(5, 3).value(), 0.625);
  EXPECT_EQ(ExactScalar::dyadic(1, 52).value(), std::ldexp(1.0, -52));
  EXPECT_TRUE(ExactScalar::dyadic(6, 4).is_dyadic());
  EXPECT_EQ(ExactScalar::dyadic(6, 4).dyadic_exponent(), 3);  // 6/16 = 3/8
}

TEST(ExactScalar, RationalNormalizationPreservesValue) {
  const auto a = ExactScalar::rational(6, 18);
  EXPECT_EQ(a.num(), 1);
  EXPECT_EQ(a.den(), 3);
  EXPECT_EQ(a, ExactScalar::rational(-2, -6));
  EXPECT_DOUBLE_EQ(a.value(), 1.0 / 3.0);
  EXPECT_FALSE(a.is_dyadic());
  EXPECT_EQ(a.dyadic_exponent(), -1);
  EXPECT_THROW(ExactScalar::rational(1, 0), domain_error);
}

TEST(ExactScalar, FromDouble) {
  EXPECT_EQ(ExactScalar::from_double(0.75), ExactScalar::dyadic(3, 2));
  EXPECT_EQ(ExactScalar::from_double(0.0), ExactScalar::rational(0, 1));
  // The double nearest 0.1 is 3602879701896397 / 2^55.
  EXPECT_EQ(ExactScalar::from_double(0.1).dyadic_exponent(), 55);
  EXPECT_EQ(ExactScalar::from_double(0.1).value(), 0.1);
  EXPECT_THROW(ExactScalar::from_double(1e-30), domain_error);
}

TEST(ExactScalar, DoublingMap) {
  auto x = ExactScalar::rational(1, 3);
  EXPECT_TRUE(x.below_half());
  x = x.doubled_mod();
  EXPECT_EQ(x, ExactScalar::rational(2, 3));
  x = x.doubled_mod();
  EXPECT_EQ(x, ExactScalar::rational(1, 3));
  EXPECT_EQ(ExactScalar::dyadic(3, 2).doubled_mod(), ExactScalar::dyadic(1, 1));
}
