#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trajexp/field.hpp"

using namespace trajexp;

namespace {

constexpr double kPi = std::numbers::pi;

Rational R(long num, long den = 1) { return Rational(num) / den; }

// f(x) = 1 + x in one dimension.
std::shared_ptr<PolyField<Rational>> one_plus_x() {
  std::vector<PolyMonomial<Rational>> ms;
  ms.push_back({{0}, {R(1)}});
  ms.push_back({{1}, {R(1)}});
  return std::make_shared<PolyField<Rational>>(1, ms);
}

// f(x) = (sin x2, 0) on the 2 pi torus.
std::shared_ptr<TrigField> sin_x2_field(double amplitude = 1.0) {
  TrigMode m;
  m.k = {0, 1};
  m.c = {std::complex<double>(0, -amplitude / 2), 0.0};
  return std::make_shared<TrigField>(2, VecD{2 * kPi, 2 * kPi},
                                     std::vector<TrigMode>{m}, true, true);
}

// Taylor-Green velocity pattern as a trig field:
// (cos x1 sin x2, -sin x1 cos x2).
std::shared_ptr<TrigField> taylor_green_field(double a = 1.0) {
  // cos x1 sin x2 = (e^{i(x1+x2)} - e^{i(x1-x2)})/(4i) + conj terms
  TrigMode p, q;  // k = (1,1) and k = (1,-1)
  p.k = {1, 1};
  p.c = {std::complex<double>(0, -a / 4), std::complex<double>(0, a / 4)};
  q.k = {1, -1};
  q.c = {std::complex<double>(0, a / 4), std::complex<double>(0, a / 4)};
  return std::make_shared<TrigField>(2, VecD{2 * kPi, 2 * kPi},
                                     std::vector<TrigMode>{p, q}, true, true);
}

Semigroup unit_semigroup(int cap, const std::string& nu = "1") {
  return Semigroup({R(1)}, parse_rational(nu), cap);
}

std::mt19937_64 rng(987654);

}  // namespace

TEST_CASE("polynomial field derivatives") {
  auto f = one_plus_x();
  Vec<Rational> x0{R(0)};

  Tensor<Rational> d1 = f->derivative_tensor(x0, 1);
  int alpha0[] = {0};
  CHECK(d1.at(0, alpha0) == R(1));

  Tensor<Rational> d2 = f->derivative_tensor(x0, 2);
  CHECK(d2.is_zero());

  CHECK(f->eval({R(3)}) == Vec<Rational>{R(4)});
}

TEST_CASE("trig field evaluation and first derivative") {
  auto f = sin_x2_field();
  VecD v = f->eval({0.3, 0.7});
  CHECK(v[0] == doctest::Approx(std::sin(0.7)).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.0));

  // D f at the origin is [[0, 1], [0, 0]]
  Tensor<double> d1 = f->derivative_tensor({0.0, 0.0}, 1);
  int a0[] = {0}, a1[] = {1};
  CHECK(d1.at(0, a0) == doctest::Approx(0.0));
  CHECK(d1.at(0, a1) == doctest::Approx(1.0));
  CHECK(d1.at(1, a0) == doctest::Approx(0.0));
  CHECK(d1.at(1, a1) == doctest::Approx(0.0));
}

TEST_CASE("trig derivatives agree with central finite differences") {
  auto f = taylor_green_field(0.8);
  VecD x{0.4, 1.1};
  const double h = 1e-5;

  Tensor<double> d1 = f->derivative_tensor(x, 1);
  for (int a = 0; a < 2; ++a) {
    VecD xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    VecD fp = f->eval(xp), fm = f->eval(xm);
    for (int i = 0; i < 2; ++i) {
      int alpha[] = {a};
      CHECK(d1.at(i, alpha) == doctest::Approx((fp[i] - fm[i]) / (2 * h)).epsilon(1e-8));
    }
  }

  Tensor<double> d2 = f->derivative_tensor(x, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      VecD xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[a] += h; xpp[b] += h;
      xpm[a] += h; xpm[b] -= h;
      xmp[a] -= h; xmp[b] += h;
      xmm[a] -= h; xmm[b] -= h;
      for (int i = 0; i < 2; ++i) {
        double fd = (f->eval(xpp)[i] - f->eval(xpm)[i] - f->eval(xmp)[i] + f->eval(xmm)[i]) /
                    (4 * h * h);
        int alpha[] = {a, b};
        CHECK(d2.at(i, alpha) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
}

TEST_CASE("divergence-free flag is validated and holds pointwise") {
  auto f = taylor_green_field();
  CHECK(f->divergence_defect() < 1e-12);

  std::uniform_real_distribution<double> u(0, 2 * kPi);
  for (int trial = 0; trial < 100; ++trial) {
    VecD x{u(rng), u(rng)};
    Tensor<double> d1 = f->derivative_tensor(x, 1);
    int a0[] = {0}, a1[] = {1};
    double div = d1.at(0, a0) + d1.at(1, a1);
    CHECK(std::abs(div) < 1e-12);
  }

  // A mode with kappa . c != 0 must be rejected when the flag is set.
  TrigMode bad;
  bad.k = {1, 0};
  bad.c = {std::complex<double>(0.5, 0), 0.0};
  CHECK_THROWS_AS(TrigField(2, VecD{2 * kPi, 2 * kPi}, {bad}, true, true), InvalidInput);
}

TEST_CASE("zero-mean flag rejects a k = 0 mode") {
  TrigMode mean;
  mean.k = {0, 0};
  mean.c = {std::complex<double>(1, 0), 0.0};
  CHECK_THROWS_AS(TrigField(2, VecD{2 * kPi, 2 * kPi}, {mean}, true, false), InvalidInput);
  CHECK_NOTHROW(TrigField(2, VecD{2 * kPi, 2 * kPi}, {mean}, false, false));
}

TEST_CASE("field expansion: q tensors and the 1/m! factor") {
  std::vector<ExpansionTerm<Rational>> terms;
  terms.push_back({1, {one_plus_x()}});
  FieldExpansion<Rational> fe(1, unit_semigroup(8), terms, {R(0)}, 8, false, {}, 10);

  Vec<Rational> x0{R(0)};
  // m = 0 is q_n(x*, t) itself
  auto q0 = fe.tensor_poly(1, 0, x0).as_polyvec();
  CHECK(q0 == PolyVec<Rational>::from_coefficients(1, {{R(1)}}));
  CHECK(fe.q_at(1, x0) == q0);

  // m = 1 is D q_1(x*)
  auto q1 = fe.tensor_poly(1, 1, x0);
  int a0[] = {0};
  CHECK(q1.power(0).at(0, a0) == R(1));

  // m = 2 vanishes for an affine field
  auto q2 = fe.tensor_poly(1, 2, x0);
  CHECK(q2.power(0).is_zero());

  CHECK_THROWS_AS(fe.tensor_poly(2, 0, x0), InvalidInput);  // term not stored
}

TEST_CASE("apply_tensor: identity, arity and a hand contraction") {
  // m = 1 identity matrix maps p to p
  DerivativeTensor<Rational> id(2, 1);
  Tensor<Rational> eye(2, 1);
  for (int i = 0; i < 2; ++i) {
    int alpha[] = {i};
    eye.at(i, alpha) = R(1);
  }
  id.set_power(0, eye);
  auto p = PolyVec<Rational>::from_coefficients(2, {{R(2), R(3)}, {R(1), R(0)}});
  std::vector<PolyVec<Rational>> args{p};
  CHECK(id.apply(args) == p);

  // m = 2 with the single entry Q[0; (0,0)] = 2 on constants (1) gives (2)
  DerivativeTensor<Rational> q(1, 2);
  Tensor<Rational> t2(1, 2);
  int a00[] = {0, 0};
  t2.at(0, a00) = R(2);
  q.set_power(0, t2);
  auto one = PolyVec<Rational>::from_coefficients(1, {{R(1)}});
  std::vector<PolyVec<Rational>> ones{one, one};
  CHECK(q.apply(ones) == PolyVec<Rational>::from_coefficients(1, {{R(2)}}));

  std::vector<PolyVec<Rational>> wrong{one};
  CHECK_THROWS_AS(q.apply(wrong), InvalidInput);
}

TEST_CASE("tensor application is symmetric in its arguments") {
  // Derivative tensors of a genuine field are symmetric; contraction must not
  // depend on the argument order.
  std::vector<PolyMonomial<Rational>> ms;
  ms.push_back({{2, 1}, {R(3), R(-1)}});
  ms.push_back({{1, 2}, {R(1, 2), R(5)}});
  auto f = std::make_shared<PolyField<Rational>>(2, ms);
  Vec<Rational> x{R(1, 3), R(-2)};

  DerivativeTensor<Rational> q(2, 2);
  q.set_power(0, f->derivative_tensor(x, 2));

  auto p1 = PolyVec<Rational>::from_coefficients(2, {{R(1), R(2)}, {R(0), R(1)}});
  auto p2 = PolyVec<Rational>::from_coefficients(2, {{R(-1), R(1, 3)}});
  std::vector<PolyVec<Rational>> ab{p1, p2}, ba{p2, p1};
  CHECK(q.apply(ab) == q.apply(ba));
}

TEST_CASE("multilinear bound at sampled times") {
  auto f = taylor_green_field();
  VecD x{0.2, 0.9};
  DerivativeTensor<double> q(2, 2);
  q.set_power(0, f->derivative_tensor(x, 2));

  auto p1 = PolyVec<double>::from_coefficients(2, {{0.3, -1.2}, {0.07, 0.4}});
  auto p2 = PolyVec<double>::from_coefficients(2, {{1.5, 0.2}});
  std::vector<PolyVec<double>> args{p1, p2};
  PolyVec<double> applied = q.apply(args);

  // Estimate ||Q|| by sampling unit vectors.
  double norm_q = 0;
  std::uniform_real_distribution<double> angle(0, 2 * kPi);
  std::vector<Vec<double>> unit(2, Vec<double>(2));
  for (int trial = 0; trial < 500; ++trial) {
    for (auto& v : unit) {
      double a = angle(rng);
      v = {std::cos(a), std::sin(a)};
    }
    Vec<double> y = q.power(0).apply(std::span<const Vec<double>>(unit.data(), 2));
    norm_q = std::max(norm_q, std::hypot(y[0], y[1]));
  }
  for (double t : {0.0, 0.5, 1.7, 3.0}) {
    VecD lhs = applied.eval_double(t);
    VecD v1 = p1.eval_double(t), v2 = p2.eval_double(t);
    double bound = norm_q * std::hypot(v1[0], v1[1]) * std::hypot(v2[0], v2[1]);
    CHECK(std::hypot(lhs[0], lhs[1]) <= bound * (1 + 1e-9) + 1e-12);
  }
}

TEST_CASE("eval_velocity: truncation, damping and the mean-flow shift") {
  std::vector<ExpansionTerm<double>> terms;
  terms.push_back({1, {sin_x2_field()}});
  const double nu = 0.1;
  Semigroup sg({R(1)}, R(1, 10), 6);
  FieldExpansion<double> fe(2, sg, terms, {0.0, 0.0}, 3, true, {2 * kPi, 2 * kPi});

  // At t = 0 the single term is q_1 itself.
  VecD x{0.3, 0.7};
  VecD u = fe.eval_velocity(x, 0.0, 1);
  CHECK(u[0] == doctest::Approx(std::sin(0.7)).epsilon(1e-12));

  // At t = ln 2 / mu_1 the amplitude has halved.
  double t_half = std::log(2.0) / nu;
  u = fe.eval_velocity(x, t_half, 1);
  CHECK(u[0] == doctest::Approx(0.5 * std::sin(0.7)).epsilon(1e-12));

  CHECK_THROWS_AS(fe.eval_velocity(x, 0.0, 4), InvalidInput);  // beyond stored terms

  // Zero expansion returns the mean flow.
  std::vector<ExpansionTerm<double>> zterms;
  zterms.push_back(
      {1, {std::make_shared<TrigField>(2, VecD{2 * kPi, 2 * kPi}, std::vector<TrigMode>{},
                                       true, false)}});
  FieldExpansion<double> zero(2, sg, zterms, {2.5, -1.0}, 2, true, {2 * kPi, 2 * kPi});
  VecD uz = zero.eval_velocity({0.1, 0.2}, 5.0, 2);
  CHECK(uz[0] == doctest::Approx(2.5));
  CHECK(uz[1] == doctest::Approx(-1.0));
}

TEST_CASE("Taylor-Green analytic expansion halves at t = ln2 / (2 nu)") {
  const double nu = 0.1;
  std::vector<ExpansionTerm<double>> terms;
  terms.push_back({1, {taylor_green_field()}});
  // lambda = 2 shell: mu_1 = 2 nu with generators {2} and nu = 1/10
  Semigroup sg({R(2)}, R(1, 10), 4);
  FieldExpansion<double> fe(2, sg, terms, {0.0, 0.0}, 1, true, {2 * kPi, 2 * kPi});

  VecD x{0.8, 0.3};
  VecD u0 = fe.eval_velocity(x, 0.0, 1);
  double t_half = std::log(2.0) / (2 * nu);
  VecD uh = fe.eval_velocity(x, t_half, 1);
  CHECK(uh[0] == doctest::Approx(0.5 * u0[0]).epsilon(1e-12));
  CHECK(uh[1] == doctest::Approx(0.5 * u0[1]).epsilon(1e-12));
}

TEST_CASE("ingestion rejects a time-dependent q_1") {
  std::vector<ExpansionTerm<Rational>> terms;
  terms.push_back({1, {one_plus_x(), one_plus_x()}});
  CHECK_THROWS_AS(
      FieldExpansion<Rational>(1, unit_semigroup(4), terms, {R(0)}, 4, false, {}, 6),
      InvalidInput);
}

TEST_CASE("ingestion rejects duplicate and out-of-range term indices") {
  std::vector<ExpansionTerm<Rational>> dup;
  dup.push_back({1, {one_plus_x()}});
  dup.push_back({1, {one_plus_x()}});
  CHECK_THROWS_AS(
      FieldExpansion<Rational>(1, unit_semigroup(4), dup, {R(0)}, 4, false, {}, 6),
      InvalidInput);

  std::vector<ExpansionTerm<Rational>> beyond;
  beyond.push_back({1, {one_plus_x()}});
  beyond.push_back({5, {one_plus_x()}});
  CHECK_THROWS_AS(
      FieldExpansion<Rational>(1, unit_semigroup(8), beyond, {R(0)}, 4, false, {}, 6),
      InvalidInput);
}
