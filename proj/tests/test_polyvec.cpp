#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trajexp/poly.hpp"

using namespace trajexp;

namespace {

Rational R(long num, long den = 1) { return Rational(num) / den; }

template <typename T>
PolyVec<T> pv(int dim, std::vector<Vec<T>> coeffs) {
  return PolyVec<T>::from_coefficients(dim, coeffs);
}

std::mt19937_64 rng(20240811);

Rational random_rational() {
  std::uniform_int_distribution<int> num(-30, 30), den(1, 12);
  return Rational(num(rng)) / den(rng);
}

PolyVec<Rational> random_polyvec(int dim, int max_deg) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  int d = deg(rng);
  std::vector<Vec<Rational>> coeffs(d + 1, Vec<Rational>(dim));
  for (auto& row : coeffs)
    for (auto& v : row) v = random_rational();
  return PolyVec<Rational>::from_coefficients(dim, coeffs);
}

}  // namespace

TEST_CASE("evaluation") {
  auto constant = pv<Rational>(2, {{R(1), R(0)}});
  CHECK(constant.eval(R(7)) == Vec<Rational>{R(1), R(0)});

  auto linear = pv<Rational>(2, {{R(0), R(0)}, {R(1), R(2)}});
  CHECK(linear.eval(R(2)) == Vec<Rational>{R(2), R(4)});

  auto quad = pv<Rational>(1, {{R(1)}, {R(1)}, {R(1)}});
  CHECK(quad.eval(R(3)) == Vec<Rational>{R(13)});
  CHECK(quad.eval_double(3.0)[0] == doctest::Approx(13.0));
}

TEST_CASE("ring operations") {
  auto c = pv<Rational>(1, {{R(5)}});
  CHECK(c.derivative().is_zero());

  // addition collapses the degree when leading coefficients cancel
  auto a = pv<Rational>(1, {{R(1)}, {R(2)}});
  auto b = pv<Rational>(1, {{R(3)}, {R(-2)}});
  auto sum = a + b;
  CHECK(sum.degree() == 0);
  CHECK(sum == pv<Rational>(1, {{R(4)}}));

  // scalar polynomial times vector polynomial
  Poly<Rational> one_plus_t(std::vector<Rational>{R(1), R(1)});
  auto v = pv<Rational>(2, {{R(1), R(0)}});
  auto prod = one_plus_t * v;
  CHECK(prod == pv<Rational>(2, {{R(1), R(0)}, {R(1), R(0)}}));

  auto mismatched = pv<Rational>(2, {{R(1), R(0)}});
  CHECK_THROWS_AS(a + mismatched, InvalidInput);
}

TEST_CASE("resolvent closed forms") {
  // q' = 0 forces q = -c for gamma = 1
  auto c = Poly<Rational>(std::vector<Rational>{R(3)});
  CHECK(resolvent_solve(R(1), c) == Poly<Rational>(std::vector<Rational>{R(-3)}));

  // gamma = 2, p = t: q = -t/2 - 1/4
  auto t = Poly<Rational>(std::vector<Rational>{R(0), R(1)});
  CHECK(resolvent_solve(R(2), t) ==
        Poly<Rational>(std::vector<Rational>{R(-1, 4), R(-1, 2)}));

  // gamma = 1, p = t^2: q = -(t^2 + 2t + 2), residual identically zero
  auto t2 = Poly<Rational>(std::vector<Rational>{R(0), R(0), R(1)});
  auto q = resolvent_solve(R(1), t2);
  CHECK(q == Poly<Rational>(std::vector<Rational>{R(-2), R(-2), R(-1)}));
  auto residual = q.derivative() - q - t2;
  CHECK(residual.is_zero());
}

TEST_CASE("resolvent requires a positive rate") {
  auto p = Poly<Rational>(std::vector<Rational>{R(1)});
  CHECK_THROWS_AS(resolvent_solve(R(0), p), InvalidInput);
  CHECK_THROWS_AS(resolvent_solve(R(-2), p), InvalidInput);
  CHECK_THROWS_AS(resolvent_solve(0.0, Poly<double>(1.0)), InvalidInput);
}

TEST_CASE("resolvent residual is exactly zero on random rational input") {
  std::uniform_int_distribution<int> dims(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = dims(rng);
    PolyVec<Rational> p = random_polyvec(dim, 8);
    Rational gamma = random_rational();
    if (gamma <= 0) gamma = -gamma + R(1, 7);
    PolyVec<Rational> q = resolvent_solve(gamma, p);
    PolyVec<Rational> residual = q.derivative() - q.scaled(gamma) - p;
    CHECK(residual.is_zero());
    CHECK(q.degree() == p.degree());  // degree preservation
  }
}

TEST_CASE("resolvent of zero is zero and the map is linear") {
  PolyVec<Rational> zero(2);
  CHECK(resolvent_solve(R(3, 2), zero).is_zero());

  for (int trial = 0; trial < 50; ++trial) {
    PolyVec<Rational> p1 = random_polyvec(2, 6);
    PolyVec<Rational> p2 = random_polyvec(2, 6);
    Rational alpha = random_rational();
    Rational gamma = R(7, 3);
    auto lhs = resolvent_solve(gamma, p1.scaled(alpha) + p2);
    auto rhs = resolvent_solve(gamma, p1).scaled(alpha) + resolvent_solve(gamma, p2);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("float mode trims trailing coefficients relative to the magnitude") {
  Poly<double> p(std::vector<double>{1.0, 0.5, 1e-16});
  CHECK(p.degree() == 1);  // 1e-16 < 1e-14 * max|coeff|

  Poly<double> tiny(std::vector<double>{1e-20, 1e-22});
  CHECK(tiny.degree() == 1);  // everything is small; relative test keeps it

  auto q = resolvent_solve(2.0, Poly<double>(std::vector<double>{0.0, 1.0}));
  CHECK(q.coeff(0) == doctest::Approx(-0.25));
  CHECK(q.coeff(1) == doctest::Approx(-0.5));
}

TEST_CASE("coefficient-major round trip") {
  auto p = pv<Rational>(3, {{R(1), R(2), R(3)}, {R(0), R(0), R(4)}});
  auto coeffs = p.coefficients();
  REQUIRE(coeffs.size() == 2);
  CHECK(PolyVec<Rational>::from_coefficients(3, coeffs) == p);
}
