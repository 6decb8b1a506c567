#include "adapterforge/rational.hpp"

#include <gtest/gtest.h>

#include "adapterforge/error.hpp"

namespace adapterforge {
namespace {

TEST(Rational, NormalizesSignAndGcd)
{
  Rational r(6, -8);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 4);
  EXPECT_EQ(Rational(0, 5), Rational(0));
}

TEST(Rational, ParsesDecimalsAndFractions)
{
  EXPECT_EQ(Rational::parse("3"), Rational(3));
  EXPECT_EQ(Rational::parse("0.05"), Rational(1, 20));
  EXPECT_EQ(Rational::parse("17/20"), Rational(85, 100));
  EXPECT_EQ(Rational::parse("-0.5"), Rational(-1, 2));
  EXPECT_THROW(Rational::parse("1/0"), Error);
  EXPECT_THROW(Rational::parse("abc"), Error);
  EXPECT_THROW(Rational::parse(""), Error);
}

TEST(Rational, ArithmeticIsExact)
{
  Rational score = Rational(1) - Rational(5, 100) - Rational(10, 100);
  EXPECT_EQ(score, Rational(17, 20));
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
  EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
  EXPECT_LT(Rational(1, 2), Rational(2, 3));
}

TEST(Rational, Formats)
{
  EXPECT_EQ(Rational(17, 20).to_string(), "17/20");
  EXPECT_EQ(Rational(17, 20).to_fixed3(), "0.850");
  EXPECT_EQ(Rational(1).to_fixed3(), "1.000");
  EXPECT_EQ(Rational(2, 3).to_fixed3(), "0.667");
  EXPECT_DOUBLE_EQ(Rational(1, 4).to_double(), 0.25);
}

}  // namespace
}  // namespace adapterforge
