#include <doctest.h>

#include "phinabla/errors.hpp"
#include "support.hpp"

using namespace phn;
using support::mono;
using support::poly;
using support::same;

TEST_CASE("products and sums") {
  auto R = support::ring(5, 6, -16, 16);
  auto x = poly(R, {{1, 1}, {-1, 1}});
  auto y = poly(R, {{1, 1}, {-1, -1}});
  CHECK(same(mul(x, y), poly(R, {{2, 1}, {-2, -1}})));
  CHECK(add(x, neg(x)).is_zero());
  CHECK_FALSE(mul(x, y).window_loss());

  auto wide = mono(R, 1, 10);
  auto p = mul(wide, wide);
  CHECK(p.window_loss());
  CHECK(p.is_zero());
  CHECK(p.known_hi() < 20);
}

TEST_CASE("multiplication matches the dense oracle") {
  std::mt19937_64 rng(3);
  for (int p : {2, 3, 5}) {
    const int n = 5;
    const std::int64_t M = oracle::ipow(p, n);
    auto R = support::ring(p, n, -20, 20);
    for (int it = 0; it < 60; ++it) {
      auto x = support::random_integral(R, rng, -12, 12, 5);
      auto y = support::random_integral(R, rng, -12, 12, 5);
      auto prod = mul(x, y);
      auto expect = oracle::restrict(oracle::mul(support::to_poly(x, M), support::to_poly(y, M)), -20, 20);
      CHECK(support::to_poly(prod, M) == expect);
      CHECK(support::to_poly(add(x, y), M) == oracle::add(support::to_poly(x, M), support::to_poly(y, M)));
    }
  }
}

TEST_CASE("derivation") {
  auto R = support::ring(3, 5, -16, 16);
  CHECK(same(derive(mono(R, 1, 3)), mono(R, 3, 2)));
  CHECK(derive(mono(R, 5, 0)).is_exact_zero());
  auto d = derive(mono(R, 3, -1));
  REQUIRE(d.terms().size() == 1);
  CHECK(d.terms()[0].index == -2);
  CHECK(d.terms()[0].coeff.valuation() == 1);
  CHECK(same(d, mono(R, -3, -2)));

  std::mt19937_64 rng(9);
  const std::int64_t M = oracle::ipow(3, 5);
  for (int it = 0; it < 50; ++it) {
    auto x = support::random_integral(R, rng, -10, 10, 6);
    CHECK(support::to_poly(derive(x), M) == oracle::derive(support::to_poly(x, M)));
  }
}

TEST_CASE("Frobenius with the default lift") {
  auto R2 = support::ring(2, 6, -16, 16);
  CHECK(same(frobenius(poly(R2, {{1, 1}, {-1, 1}})), poly(R2, {{2, 1}, {-2, 1}})));
  auto x = poly(R2, {{3, 5}, {-2, 7}});
  CHECK(frobenius(x, 0).identical(x));
  auto R3 = support::ring(3, 4, -32, 32);
  CHECK(same(frobenius(mono(R3, 1, 1), 2), mono(R3, 1, 9)));

  std::mt19937_64 rng(21);
  const std::int64_t M = oracle::ipow(3, 4);
  for (int it = 0; it < 40; ++it) {
    auto y = support::random_integral(R3, rng, -8, 8, 4);
    CHECK(support::to_poly(frobenius(y), M) == oracle::frobenius(support::to_poly(y, M), 3));
  }
}

TEST_CASE("mu factors") {
  auto R = support::ring(2, 8, -32, 32);
  CHECK(same(mu_factor(R, 1), mono(R, 2, 1)));
  CHECK(same(mu_factor(R, 2), mono(R, 4, 3)));

  // u = t^2 (1 + 2t): mu = du/dt, and mu_2 = mu * phi(mu) with phi(t) = u.
  auto field = FieldContext::make(2, 1, 8);
  std::vector<Term> lift{{2, field->one()}, {3, field->from_int(2)}};
  auto G = RingContext::make_with_lift(field, -32, 32, lift);
  const std::int64_t M = 256;
  oracle::Poly u{M, {{2, 1}, {3, 2}}};
  oracle::Poly mu = oracle::derive(u);
  CHECK(support::to_poly(mu_factor(G, 1), M) == mu);
  // oracle phi(mu): substitute u for t in mu = 2t + 6t^2
  oracle::Poly phi_mu = oracle::add(oracle::mul(oracle::Poly{M, {{0, 2}}}, u),
                                    oracle::mul(oracle::Poly{M, {{0, 6}}}, oracle::mul(u, u)));
  CHECK(support::to_poly(mu_factor(G, 2), M) == oracle::mul(mu, phi_mu));
}

TEST_CASE("Gauss valuations") {
  auto R = support::ring(3, 6, -16, 16);
  auto x = poly(R, {{-1, 3}, {1, 1}});
  CHECK(*gauss_valuation(x, Rational(1, 2)) == Rational(1, 2));
  CHECK(*gauss_valuation(mono(R, 27, 0), Rational(5, 7)) == Rational(3));
  CHECK_FALSE(gauss_valuation(RobbaElement::zero(R), Rational(1)).has_value());
  CHECK_THROWS_AS(gauss_valuation(x, Rational(-1)), Error);
}

TEST_CASE("inversion") {
  auto R = support::ring(5, 3, -16, 16);
  CHECK(same(invert(mono(R, 1, 2)), mono(R, 1, -2)));

  auto x = poly(R, {{0, 1}, {-1, 5}});
  auto inv = invert(x);
  CHECK(same(inv, poly(R, {{0, 1}, {-1, -5}, {-2, 25}})));
  // oracle: the product is 1 modulo 5^3
  auto prod = oracle::mul(support::to_poly(x, 125), support::to_poly(inv, 125));
  CHECK(prod == oracle::Poly{125, {{0, 1}}});

  try {
    invert(poly(R, {{1, 1}, {2, 1}, {3, -1}}));
    FAIL("inverted an element without a dominant term");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_invertible);
  }
  CHECK_THROWS_AS(invert(RobbaElement::zero(R)), Error);
  // t^12 lives in [-4, 20] but its inverse does not
  auto skew = support::ring(5, 3, -4, 20);
  try {
    invert(mono(skew, 1, 12));
    FAIL("inverse outside the window accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_invertible);
  }

  std::mt19937_64 rng(4);
  auto S = support::ring(3, 6, -40, 40);
  for (int it = 0; it < 30; ++it) {
    auto e = support::random_integral(S, rng, -3, 3, 3);
    auto y = add(mono(S, 2, 1), scale(e, S->field().from_int(3)));
    auto yi = invert(y);
    auto one = mul(y, yi);
    CHECK(sub(one, RobbaElement::one(S)).is_zero());
  }
}

TEST_CASE("ring laws and the chain rule under Frobenius") {
  std::mt19937_64 rng(17);
  for (int p : {2, 3, 5}) {
    auto R = support::ring(p, 6, -64, 64);
    auto mu = mu_factor(R, 1);
    for (int it = 0; it < 40; ++it) {
      auto x = support::random_integral(R, rng, -6, 6, 4);
      auto y = support::random_integral(R, rng, -6, 6, 4);
      CHECK(same(derive(mul(x, y)), add(mul(derive(x), y), mul(x, derive(y)))));
      CHECK(same(frobenius(mul(x, y)), mul(frobenius(x), frobenius(y))));
      CHECK(same(frobenius(add(x, y)), add(frobenius(x), frobenius(y))));
      CHECK(same(derive(frobenius(x)), mul(mu, frobenius(derive(x)))));
      CHECK(same(mul(x, y), mul(y, x)));
    }
  }
}

TEST_CASE("general lifts satisfy the chain rule") {
  auto field = FieldContext::make(3, 1, 6);
  std::vector<Term> lift{{3, field->one()}, {4, field->from_int(3)}};
  auto G = RingContext::make_with_lift(field, -40, 40, lift);
  auto mu = mu_factor(G, 1);
  std::mt19937_64 rng(8);
  for (int it = 0; it < 20; ++it) {
    auto x = support::random_integral(G, rng, 0, 4, 3);
    auto y = support::random_integral(G, rng, 0, 4, 3);
    auto lhs = derive(frobenius(x));
    auto rhs = mul(mu, frobenius(derive(x)));
    auto diff = sub(lhs, rhs);
    for (const auto& t : diff.terms()) CHECK((t.index < diff.known_lo() || t.index > diff.known_hi()));
    auto m = sub(frobenius(mul(x, y)), mul(frobenius(x), frobenius(y)));
    for (const auto& t : m.terms()) CHECK((t.index < m.known_lo() || t.index > m.known_hi()));
  }
}

TEST_CASE("tame Kummer extensions") {
  auto R = support::ring(3, 6, -8, 8);
  auto ext = ExtensionContext::make(R, 2);
  auto S = ext->inner();
  CHECK(same(ext->pullback(poly(R, {{3, 1}, {-1, 1}})), poly(S, {{6, 1}, {-2, 1}})));
  CHECK(same(ext->derive_t(ext->pullback(mono(R, 1, 1))), RobbaElement::one(S)));
  auto t = mono(R, 1, 1);
  CHECK(same(ext->pullback(frobenius(t)), frobenius(ext->pullback(t))));
  CHECK(same(frobenius(ext->pullback(t)), mono(S, 1, 6)));
  std::mt19937_64 rng(2);
  for (int it = 0; it < 20; ++it) {
    auto x = support::random_integral(R, rng, -3, 3, 3);
    CHECK(same(ext->pullback(derive(x)), ext->derive_t(ext->pullback(x))));
  }
  try {
    ExtensionContext::make(R, 3);
    FAIL("wild extension accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::wild_ramification);
  }
}
