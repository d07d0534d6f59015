#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "coxcells/laurent_poly.hpp"

using coxcells::ArithmeticError;
using coxcells::LaurentPoly;

namespace {

LaurentPoly random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(0, 5), exp(-6, 6), coeff(-9, 9);
  LaurentPoly p;
  for (int i = nterms(rng); i > 0; --i) p += LaurentPoly::monomial(coeff(rng), exp(rng));
  return p;
}

}  // namespace

TEST(LaurentPoly, AddCancelsToZero) {
  auto v = LaurentPoly::v();
  auto z = v + (-v);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.term_count(), 0u);
  EXPECT_FALSE(z.degree().has_value());
}

TEST(LaurentPoly, BinomialSquare) {
  auto p = LaurentPoly::monomial(1, 1) + LaurentPoly::monomial(1, -1);
  auto sq = p * p;
  EXPECT_EQ(sq, LaurentPoly::from_terms({{2, 1}, {0, 2}, {-2, 1}}));
  EXPECT_EQ(sq.degree(), 2);
  EXPECT_EQ(sq.valuation(), -2);
}

TEST(LaurentPoly, QPolynomialEmbedding) {
  std::vector<std::int64_t> one_plus_q{1, 1};
  auto p = LaurentPoly::from_q_coeffs(one_plus_q);
  EXPECT_EQ(p.coeff(2), 1);
  EXPECT_EQ(p.coeff(1), 0);
  EXPECT_EQ(LaurentPoly::one().as_q_polynomial(), std::vector<std::int64_t>{1});
  EXPECT_EQ(p.as_q_polynomial(), one_plus_q);
  EXPECT_THROW((LaurentPoly::v() + LaurentPoly::one()).as_q_polynomial(), std::domain_error);
  EXPECT_THROW(LaurentPoly::monomial(1, -2).as_q_polynomial(), std::domain_error);
}

TEST(LaurentPoly, Rendering) {
  EXPECT_EQ(LaurentPoly().to_string(), "0");
  EXPECT_EQ(LaurentPoly::one().to_string(), "1");
  EXPECT_EQ(LaurentPoly::from_terms({{2, 3}, {0, 1}, {-1, -2}}).to_string(), "3*q^{2/2} + 1 - 2*q^{-1/2}");
  EXPECT_EQ(LaurentPoly::from_terms({{4, 1}, {0, 1}}).to_q_string(), "1 + q^2");
}

TEST(LaurentPoly, OverflowIsAnError) {
  auto big = LaurentPoly(std::numeric_limits<std::int64_t>::max());
  EXPECT_THROW(big + LaurentPoly::one(), ArithmeticError);
  EXPECT_THROW(big * LaurentPoly(std::int64_t{2}), ArithmeticError);
}

TEST(LaurentPoly, RingAxiomsOnRandomInputs) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 10000; ++trial) {
    auto a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    for (const auto& t : (a * b + c).terms()) ASSERT_NE(t.coeff, 0);
  }
}

TEST(LaurentPoly, ShiftRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> k(-20, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = random_poly(rng);
    int s = k(rng);
    ASSERT_EQ(a.shifted(s).shifted(-s), a);
    ASSERT_EQ(a.shifted(s), a * LaurentPoly::monomial(1, s));
  }
}
