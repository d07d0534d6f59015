#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "coxcells/a_function.hpp"
#include "coxcells/group_file.hpp"

using namespace coxcells;

namespace {

HeckeElement T(Element w) { return HeckeElement::basis_element(Basis::T, w); }

}  // namespace

TEST(HeckeMul, QuadraticRelationAndIdentity) {
  CoxeterGroup g(fixture("a2_affine"));
  auto w = g.parse("1 2 3");
  EXPECT_EQ(hecke_mul(g, T(g.identity()), T(w)), T(w));
  auto s = g.generator(0);
  auto ss = hecke_mul(g, T(s), T(s));
  EXPECT_EQ(ss.coeff(g.identity()), LaurentPoly::q());
  EXPECT_EQ(ss.coeff(s), LaurentPoly::q() - LaurentPoly::one());
  EXPECT_EQ(ss.coeffs.size(), 2u);
  EXPECT_THROW(hecke_mul(g, HeckeElement::basis_element(Basis::Cprime, s), T(s)), BasisMismatch);
}

TEST(HeckeMul, AssociativeOnRandomTriples) {
  CoxeterGroup g(fixture("a2_affine"));
  auto ball = g.enumerate_ball(4);
  std::mt19937 rng(5);
  auto s1 = g.generator(0), s2 = g.generator(1);
  EXPECT_EQ(hecke_mul(g, hecke_mul(g, T(s1), T(s2)), T(s1)), hecke_mul(g, T(s1), hecke_mul(g, T(s2), T(s1))));
  for (int i = 0; i < 60; ++i) {
    auto a = T(ball.elements[rng() % ball.size()]), b = T(ball.elements[rng() % ball.size()]),
         c = T(ball.elements[rng() % ball.size()]);
    ASSERT_EQ(hecke_mul(g, hecke_mul(g, a, b), c), hecke_mul(g, a, hecke_mul(g, b, c)));
  }
}

TEST(CprimeBasis, SmallCasesAndRoundTrip) {
  CoxeterGroup g(fixture("d4"));
  KLTable kl(g);
  EXPECT_EQ(cprime_basis(kl, g.identity()), T(g.identity()));
  auto s = g.generator(0);
  auto cs = cprime_basis(kl, s);
  EXPECT_EQ(cs.coeff(s), LaurentPoly::monomial(1, -1));
  EXPECT_EQ(cs.coeff(g.identity()), LaurentPoly::monomial(1, -1));
  auto ball = g.enumerate_ball(12);
  for (auto w : ball.elements) {
    auto back = to_cprime(kl, cprime_basis(kl, w));
    ASSERT_EQ(back.coeffs.size(), 1u);
    ASSERT_EQ(back.coeff(w), LaurentPoly::one());
  }
}

TEST(HStructure, Examples) {
  CoxeterGroup g(fixture("a2_affine"));
  KLTable kl(g);
  auto y = g.parse("1 2 3");
  auto h = h_structure(kl, g.identity(), y);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h.at(y), LaurentPoly::one());
  auto s = g.generator(1);
  auto hs = h_structure(kl, s, s);
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_EQ(hs.at(s), LaurentPoly::from_terms({{1, 1}, {-1, 1}}));

  CoxeterGroup a2(fixture("i2_3"));
  KLTable kl2(a2);
  auto w0 = a2.parse("1 2 1");
  EXPECT_EQ(h_structure(kl2, w0, w0).at(w0).degree(), 3);
}

TEST(HStructure, WGraphRouteMatchesTBasisRoute) {
  for (const char* name : {"i2_4", "a3", "b3", "a2_affine", "p5"}) {
    CoxeterGroup g(fixture(name));
    KLTable kl(g);
    auto ball = g.enumerate_ball(4);
    for (auto x : ball.elements)
      for (auto y : ball.elements) ASSERT_EQ(h_structure(kl, x, y), h_structure_tbasis(kl, x, y)) << name;
  }
}

TEST(HStructure, PositiveAndLengthBoundedOnCrystallographicFixtures) {
  for (const char* name : {"d4", "i2_6", "a2_affine"}) {
    CoxeterGroup g(fixture(name));
    KLTable kl(g);
    auto ball = g.enumerate_ball(name == std::string("d4") ? 12 : 5);
    for (auto y : ball.elements) {
      CprimeRightProducts prods(kl, y);
      for (auto x : ball.elements)
        for (const auto& [z, c] : prods.product(x).coeffs) {
          ASSERT_LE(g.length(z), g.length(x) + g.length(y));
          ASSERT_TRUE(c.all_coeffs_nonnegative()) << name;
          ASSERT_EQ(c, c.bar());
        }
    }
  }
}

TEST(AValue, Examples) {
  CoxeterGroup g(fixture("a2_affine"));
  KLTable kl(g);
  AFunction a(kl);
  EXPECT_EQ(a.exact_in_parabolic(g.identity()).value, 0);
  auto w0 = g.parse("1 2 1");
  auto v = a.exact_in_parabolic(w0, 0b011);
  EXPECT_EQ(v.value, 3);
  EXPECT_EQ(v.status, AStatus::exact);
  EXPECT_THROW(a.exact_in_group(w0), InputError);
  EXPECT_EQ(a.bound(), 6);
}

TEST(AValue, D4ExampleIsSeven) {
  auto t0 = std::chrono::steady_clock::now();
  CoxeterGroup g(fixture("d4"));
  KLTable kl(g);
  AFunction a(kl);
  auto v = g.parse("2 4 1 3 2 1 3 2 4 2 1");
  auto av = a.exact_in_group(v);
  EXPECT_EQ(av.value, 7);
  EXPECT_EQ(av.status, AStatus::exact);
  auto dp = delta_pi(kl, v);
  EXPECT_EQ(dp.delta, 2);
  EXPECT_GE(dp.pi, 1);
  EXPECT_EQ(g.length(v) - av.value - 2 * dp.delta, 0);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::minutes(5));
}

TEST(AValue, LongestElementsHaveAEqualLength) {
  for (const char* name : {"d4", "b3", "h3", "a4_affine", "triangle_237", "p5"}) {
    CoxeterGroup g(fixture(name));
    KLTable kl(g);
    AFunction a(kl);
    for (const auto& p : finite_parabolics(g.system())) {
      auto w0 = longest_element(g, p.mask);
      ASSERT_EQ(a.exact_in_parabolic(w0, p.mask).value, g.length(w0)) << name << " " << p.type_label;
    }
  }
}

TEST(AValue, ParabolicAndSupportScopesAgree) {
  CoxeterGroup g(fixture("d4"));
  KLTable kl(g);
  AFunction a(kl);
  for (auto w : g.enumerate_ball(12).elements)
    ASSERT_EQ(a.exact_in_group(w).value, a.exact_in_parabolic(w).value) << g.format(w);
}

TEST(AValue, BallBoundsMonotoneAndBelowExact) {
  CoxeterGroup g(fixture("a2_affine"));
  KLTable kl(g);
  AFunction a(kl);
  auto ball = g.enumerate_ball(6);
  for (auto z : ball.elements) {
    int prev = 0;
    for (int r = 2; r <= 8; r += 2) {
      auto lb = a.ball_lower_bound(z, r);
      ASSERT_EQ(lb.status, AStatus::lower_bound);
      ASSERT_GE(lb.value, prev);
      prev = lb.value;
    }
    if (a.has_exact(z)) ASSERT_LE(prev, a.exact_in_parabolic(z).value);
  }
  // The dihedral longest element reaches its exact value inside radius 6.
  EXPECT_EQ(a.ball_lower_bound(g.parse("1 2 1"), 6).value, 3);
}

TEST(AValue, BoundViolationIsReported) {
  CoxeterGroup g(fixture("i2_3"));
  KLTable kl(g);
  AFunction a(kl, 2);
  EXPECT_THROW(a.exact_in_group(g.identity()), ABoundViolation);
}

TEST(DeltaPi, Examples) {
  CoxeterGroup g(fixture("i2_7"));
  KLTable kl(g);
  auto e = delta_pi(kl, g.identity());
  EXPECT_EQ(e.delta, 0);
  EXPECT_EQ(e.pi, 1);
  auto w0 = longest_element(g, 0b11);
  auto d = delta_pi(kl, w0);
  EXPECT_EQ(d.delta, 0);
  EXPECT_EQ(d.pi, 1);
}

TEST(GammaDelta, Examples) {
  CoxeterGroup g(fixture("i2_3"));
  KLTable kl(g);
  AFunction a(kl);
  auto e = g.identity();
  EXPECT_EQ(gamma_delta_consts(kl, e, e, e, a.exact_in_group(e)), std::make_pair(std::int64_t{1}, std::int64_t{0}));
  auto s = g.generator(0);
  EXPECT_EQ(gamma_delta_consts(kl, s, s, s, a.exact_in_group(s)).first, 1);
  EXPECT_THROW(gamma_delta_consts(kl, s, s, s, AValue{1, AStatus::lower_bound, "ball(4)"}), InputError);
  // Cyclic symmetry gamma_{x,y,z} = gamma_{y,z,x} on the whole group, with z read as z^{-1}.
  auto all = g.enumerate_ball(3);
  for (auto x : all.elements)
    for (auto y : all.elements)
      for (auto z : all.elements) {
        auto gxyz = gamma_delta_consts(kl, x, y, g.inverse(z), a.exact_in_group(g.inverse(z))).first;
        auto gyzx = gamma_delta_consts(kl, y, z, g.inverse(x), a.exact_in_group(g.inverse(x))).first;
        ASSERT_EQ(gxyz, gyzx);
      }
}
