#include <cmath>
#include <random>

#include "doctest.h"

#include "chiralvdw/finite_difference.hpp"
#include "chiralvdw/quadrature.hpp"

using namespace chiralvdw;

namespace {

// Oracle: integral of exp(-a x) x^n over [0, inf) = n! / a^(n+1).
double gamma_moment(int n, double a) { return std::tgamma(n + 1.0) / std::pow(a, n + 1); }

// Oracle: I0(1) from its power series.
double bessel_i0(double z) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k < 40; ++k) {
    if (k > 0) term *= (z * z / 4.0) / (k * k);
    sum += term;
  }
  return sum;
}

QuadratureSpec tight() {
  QuadratureSpec s;
  s.relative_tolerance = 1e-12;
  return s;
}

}  // namespace

TEST_CASE("gauss_legendre rules integrate polynomials exactly") {
  for (int n : {2, 3, 8, 33, 64}) {
    const auto& rule = gauss_legendre(n);
    double w = 0.0;
    double m2 = 0.0;
    double top = 0.0;
    for (int i = 0; i < n; ++i) {
      w += rule.weights[i];
      m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
      top += rule.weights[i] * std::pow(rule.nodes[i], 2 * n - 2);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(top == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("integrate_semi_infinite reproduces exponential moments") {
  const auto r1 = integrate_semi_infinite([](double x) { return std::exp(-x); }, tight());
  CHECK(std::abs(r1.value - 1.0) < 1e-10);
  const auto r2 = integrate_semi_infinite([](double x) { return x * x * std::exp(-x); }, tight());
  CHECK(std::abs(r2.value - 2.0) < 1e-10);

  const double oracle = 3.0 * gamma_moment(0, 2.0) + 6.0 * gamma_moment(1, 2.0) + 4.0 * gamma_moment(2, 2.0);
  CHECK(oracle == doctest::Approx(4.0).epsilon(1e-15));
  const auto r3 = integrate_semi_infinite(
      [](double x) { return std::exp(-2.0 * x) * (3.0 + 6.0 * x + 4.0 * x * x); }, tight());
  CHECK(std::abs(r3.value - oracle) < 1e-10);
  CHECK(r3.error <= 1e-12 * std::abs(r3.value));
}

TEST_CASE("integrate_semi_infinite handles tensor values and inverse-power tails") {
  auto f = [](double x) {
    Tensor3 t = Tensor3::Zero();
    t(0, 0) = std::exp(-x);
    t(1, 2) = 1.0 / ((1.0 + x) * (1.0 + x));
    return t;
  };
  const auto r = integrate_semi_infinite(f, tight());
  CHECK(r.value(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.value(1, 2) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("integrate_semi_infinite failures") {
  QuadratureSpec spec;
  spec.max_refinements = 2;
  CHECK_THROWS_AS(integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); }, spec), QuadratureError);
  try {
    integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); }, spec);
  } catch (const QuadratureError& e) {
    CHECK(e.last_error() > 0.0);
    CHECK(e.last_estimate() > 0.0);
  }
  CHECK_THROWS_AS(integrate_semi_infinite([](double x) { return x > 1.0 ? std::nan("") : 1.0; }, spec),
                  NonFiniteError);
  QuadratureSpec bad;
  bad.nodes = 1;
  CHECK_THROWS_AS(integrate_semi_infinite([](double x) { return std::exp(-x); }, bad), std::invalid_argument);
  bad = QuadratureSpec{};
  bad.relative_tolerance = 0.0;
  CHECK_THROWS_AS(integrate_semi_infinite([](double x) { return std::exp(-x); }, bad), std::invalid_argument);
}

TEST_CASE("quadrature is linear") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  auto f = [](double x) { return std::exp(-x) * std::cos(x); };
  auto g = [](double x) { return x / std::pow(1.0 + x, 3); };
  const QuadratureSpec spec = tight();
  const double fi = integrate_semi_infinite(f, spec).value;
  const double gi = integrate_semi_infinite(g, spec).value;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = coef(rng);
    const double b = coef(rng);
    const double combined = integrate_semi_infinite([&](double x) { return a * f(x) + b * g(x); }, spec).value;
    const double scale = std::abs(a * fi) + std::abs(b * gi);
    CHECK(std::abs(combined - (a * fi + b * gi)) <= 1e-10 * scale);
  }
}

TEST_CASE("doubling nodes does not increase the error estimate") {
  auto f = [](double x) { return std::exp(-x) * (1.0 + std::sin(3.0 * x)); };
  QuadratureSpec spec;
  spec.max_refinements = 0;
  spec.relative_tolerance = 1.0;  // accept the first comparison
  double previous = INFINITY;
  for (int n : {4, 8, 16, 32, 64}) {
    spec.nodes = n;
    const auto r = integrate_semi_infinite(f, spec);
    CHECK(r.error <= previous + 1e-12);
    previous = r.error;
  }
}

TEST_CASE("integrate_interval") {
  const auto r = integrate_interval([](double x) { return std::sin(x); }, 0.0, kPi, tight());
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("integrate_periodic") {
  CHECK(integrate_periodic([](double p) { return std::cos(p) * std::cos(p); }, 16) ==
        doctest::Approx(kPi).epsilon(1e-14));
  CHECK(std::abs(integrate_periodic([](double p) { return std::sin(p) * std::cos(p); }, 16)) < 1e-14);
  const double oracle = 2.0 * kPi * bessel_i0(1.0);
  CHECK(oracle == doctest::Approx(7.95493).epsilon(1e-6));
  CHECK(integrate_periodic([](double p) { return std::exp(std::cos(p)); }, 32) ==
        doctest::Approx(oracle).epsilon(1e-14));
  CHECK_THROWS_AS(integrate_periodic([](double) { return 1.0; }, 3), std::invalid_argument);
}

TEST_CASE("gradient_central") {
  const Vector3 a(0.5, -2.0, 3.0);
  const Vector3 g1 = gradient_central([&](const Vector3& r) { return r.dot(a); }, Vector3(1, 1, 1), 1e-3);
  CHECK((g1 - a).norm() < 1e-10);

  const Vector3 g2 = gradient_central([](const Vector3& r) { return r.squaredNorm(); }, Vector3(1, 2, 3), 1e-4);
  CHECK((g2 - Vector3(2, 4, 6)).norm() < 1e-7);

  auto inv6 = [](const Vector3& r) { return std::pow(r.squaredNorm(), -3); };
  // Oracle: d/dz r^-6 = -6 z / r^8.
  const Vector3 at(0, 0, 2);
  const double oracle_z = -6.0 * 2.0 / std::pow(2.0, 8);
  CHECK(oracle_z == doctest::Approx(-0.046875));
  const Vector3 g3 = gradient_central(inv6, at, 1e-4);
  CHECK(std::abs(g3.z() - oracle_z) < 1e-8);
  CHECK(std::abs(g3.x()) < 1e-12);

  // Error is O(h^2).
  const Vector3 p(0.3, -0.4, 1.1);
  const double r2 = p.squaredNorm();
  const Vector3 exact = -6.0 * p / std::pow(r2, 4);
  const double e1 = (gradient_central(inv6, p, 1e-2) - exact).norm();
  const double e2 = (gradient_central(inv6, p, 5e-3) - exact).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  CHECK_THROWS_AS(gradient_central([](const Vector3& r) { return 1.0 / r.x(); }, Vector3(0, 1, 1), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      gradient_central([](const Vector3& r) { return r.x() > 0.0 ? INFINITY : 0.0; }, Vector3(0, 1, 1), 1e-3),
      NumericalError);
}

TEST_CASE("tensor helpers") {
  const Vector3 u(1, 2, 3);
  const Vector3 v(-1, 0.5, 2);
  const Tensor3 d = dyadic(u, v);
  CHECK(d(1, 2) == doctest::Approx(u(1) * v(2)));
  CHECK((cross_matrix(u) * v - u.cross(v)).norm() < 1e-14);
  Tensor3 t;
  t << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  // v x T acts on columns, T x v on rows.
  const Tensor3 left = cross_left(v, t);
  const Tensor3 right = cross_right(t, v);
  for (int k = 0; k < 3; ++k) {
    CHECK((left.col(k) - v.cross(Vector3(t.col(k)))).norm() < 1e-13);
    CHECK((Vector3(right.row(k).transpose()) - Vector3(t.row(k).transpose()).cross(v)).norm() < 1e-13);
  }
  const Tensor3 a = t;
  const Tensor3 b = cross_matrix(u) + Tensor3::Identity();
  CHECK(((a * b).transpose() - b.transpose() * a.transpose()).norm() < 1e-12);
  CHECK((a + b).trace() == doctest::Approx(a.trace() + b.trace()));
}
