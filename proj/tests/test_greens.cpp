#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"

#include "chiralvdw/errors.hpp"
#include "chiralvdw/greens.hpp"

using namespace chiralvdw;

namespace {

using TensorField = std::function<Tensor3(const Vector3&)>;

double levi(int i, int j, int k) { return 0.5 * (i - j) * (j - k) * (k - i); }

std::array<Tensor3, 3> fd_partials(const TensorField& f, const Vector3& at, double h) {
  std::array<Tensor3, 3> d;
  for (int k = 0; k < 3; ++k) {
    Vector3 p = at;
    Vector3 m = at;
    p(k) += h;
    m(k) -= h;
    d[k] = (f(p) - f(m)) / (2.0 * h);
  }
  return d;
}

// Oracle: (nabla x T)_ij = eps_ikl d_k T_lj, by central differences.
Tensor3 fd_curl_left(const TensorField& f, const Vector3& at, double h) {
  const auto d = fd_partials(f, at, h);
  Tensor3 out = Tensor3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out(i, j) += levi(i, k, l) * d[k](l, j);
  return out;
}

// Oracle: (T x nabla')_ij = eps_jkl d'_l T_ik.
Tensor3 fd_curl_right(const TensorField& f, const Vector3& at, double h) {
  const auto d = fd_partials(f, at, h);
  Tensor3 out = Tensor3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out(i, j) += levi(j, k, l) * d[l](i, k);
  return out;
}

double rel(const Tensor3& a, const Tensor3& b) { return (a - b).norm() / b.norm(); }

QuadratureSpec tight_plate() {
  QuadratureSpec s = default_plate_spec();
  s.relative_tolerance = 1e-12;
  return s;
}

Tensor3 rotation(double a, double b, double c) {
  return (Eigen::AngleAxisd(a, Vector3::UnitZ()) * Eigen::AngleAxisd(b, Vector3::UnitY()) *
          Eigen::AngleAxisd(c, Vector3::UnitX()))
      .toRotationMatrix();
}

}  // namespace

TEST_CASE("free-space tensor closed form") {
  const GeometryPair g{Vector3::Zero(), Vector3(0, 0, 1)};
  const Tensor3 G = free_space_G(g, 1.0);
  // Hand evaluation at xi r = 1: a = 3, b = 7, so diag(3, 3, -4) e^-1 / (4 pi).
  const double pre = std::exp(-1.0) / (4.0 * kPi);
  Tensor3 oracle = Tensor3::Zero();
  oracle.diagonal() << 3.0 * pre, 3.0 * pre, -4.0 * pre;
  CHECK(rel(G, oracle) < 1e-14);
  CHECK((G - G.transpose()).norm() < 1e-16);

  const Tensor3 C = curl_free_space_G(g, 1.0);
  const Vector3 e = g.unit();
  CHECK(std::abs(e.dot(C * e)) < 1e-16);
  CHECK((C + C.transpose()).norm() < 1e-16);
  CHECK((curl_free_space_G(g.swapped(), 1.0) + C).norm() < 1e-16);

  CHECK_THROWS_AS(free_space_G(GeometryPair{Vector3(1, 1, 1), Vector3(1, 1, 1)}, 1.0), SingularityError);
  CHECK_THROWS_AS(free_space_G(g, 0.0), std::invalid_argument);
}

TEST_CASE("free-space tensor is rotation covariant") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GeometryPair g{Vector3(u(rng), u(rng), u(rng)), Vector3(u(rng), u(rng), u(rng))};
    const Tensor3 R = rotation(u(rng), u(rng), u(rng));
    const GeometryPair rg{R * g.r_a, R * g.r_b};
    const double xi = 0.1 + std::abs(u(rng));
    CHECK(rel(free_space_G(rg, xi), R * free_space_G(g, xi) * R.transpose()) < 1e-12);
    CHECK(rel(curl_free_space_G(rg, xi), R * curl_free_space_G(g, xi) * R.transpose()) < 1e-12);
  }
}

TEST_CASE("free-space curls match finite differences") {
  const double xi = 0.8;
  const Vector3 a(0.2, -0.1, 0.3);
  const Vector3 b(0.9, 0.5, -0.4);
  const double h = 1e-5;
  const GreensBundle bundle = free_space_bundle({a, b}, xi);
  const TensorField g_of_a = [&](const Vector3& r) { return free_space_G({r, b}, xi); };
  const TensorField g_of_b = [&](const Vector3& r) { return free_space_G({a, r}, xi); };
  const TensorField curl_of_b = [&](const Vector3& r) { return curl_free_space_G({a, r}, xi); };
  CHECK(rel(bundle.curl_left, fd_curl_left(g_of_a, a, h)) < 1e-6);
  CHECK(rel(bundle.curl_right, fd_curl_right(g_of_b, b, h)) < 1e-6);
  CHECK(rel(bundle.curl_both, fd_curl_right(curl_of_b, b, h)) < 1e-6);
}

TEST_CASE("plate tensor: curls match finite differences") {
  const PlateSpec plate{0.0, +1, +1};
  const QuadratureSpec spec = tight_plate();
  const double xi = 0.7;
  const Vector3 a(0.1, 0.2, 0.5);
  const Vector3 b(0.4, -0.3, 0.8);
  const double h = 1e-4;
  const GreensResult res = plate_bundle({a, b}, plate, xi, spec);
  CHECK(res.error < 1e-9);
  const auto g_at = [&](const Vector3& ra, const Vector3& rb) { return plate_bundle({ra, rb}, plate, xi, spec).bundle; };
  const TensorField g_of_a = [&](const Vector3& r) { return g_at(r, b).g; };
  const TensorField g_of_b = [&](const Vector3& r) { return g_at(a, r).g; };
  const TensorField curl_of_b = [&](const Vector3& r) { return g_at(a, r).curl_left; };
  CHECK(rel(res.bundle.curl_left, fd_curl_left(g_of_a, a, h)) < 1e-4);
  CHECK(rel(res.bundle.curl_right, fd_curl_right(g_of_b, b, h)) < 1e-4);
  CHECK(rel(res.bundle.curl_both, fd_curl_right(curl_of_b, b, h)) < 1e-4);
  CHECK(rel(curl_plate_G({a, b}, plate, xi, spec), res.bundle.curl_left) < 1e-14);
}

TEST_CASE("plate tensor symmetries") {
  const QuadratureSpec spec = default_plate_spec();
  const PlateSpec plus{0.0, +1, +1};
  const PlateSpec minus = plus.flipped();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> lat(-1.5, 1.5);
  std::uniform_real_distribution<double> hz(0.05, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const GeometryPair g{Vector3(lat(rng), lat(rng), hz(rng)), Vector3(lat(rng), lat(rng), hz(rng))};
    const double xi = 0.2 + 0.5 * trial;
    const GreensBundle p = plate_bundle(g, plus, xi, spec).bundle;
    const GreensBundle m = plate_bundle(g, minus, xi, spec).bundle;
    CHECK((p.g + m.g).norm() <= 1e-14 * p.g.norm());
    CHECK((p.curl_left + m.curl_left).norm() <= 1e-14 * p.curl_left.norm());
    CHECK((p.curl_both + m.curl_both).norm() <= 1e-14 * p.curl_both.norm());
    // A perfect chiral plate never maps z-polarised to z-polarised.
    CHECK(std::abs(p.g(2, 2)) <= 1e-12 * p.g.norm());

    const GreensBundle s = plate_bundle(g.swapped(), plus, xi, spec).bundle;
    CHECK(rel(s.g, Tensor3(p.g.transpose())) < 1e-9);
    CHECK(rel(p.curl_right, Tensor3(-s.curl_left.transpose())) < 1e-9);
    CHECK(rel(s.curl_both, Tensor3(p.curl_both.transpose())) < 1e-9);
  }
}

TEST_CASE("plate tensor reduces to the non-retarded forms") {
  const PlateSpec plate{0.0, +1, +1};
  const QuadratureSpec spec = tight_plate();
  const Vector3 a(0.0, 0.0, 0.6);
  const Vector3 b(0.5, -0.7, 0.4);
  const GeometryPair g{a, b};
  const double rp = plate_frame(g, plate).r_plus();
  double previous_g = INFINITY;
  double previous_c = INFINITY;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const double xi = t / rp;
    const GreensBundle full = plate_bundle(g, plate, xi, spec).bundle;
    const double eg = rel(full.g, plate_scattering_G_nr(g, plate, xi));
    const double ec = rel(full.curl_left, curl_plate_G_nr(g, plate, xi));
    CHECK(eg < previous_g);
    CHECK(ec < previous_c);
    previous_g = eg;
    previous_c = ec;
  }
  CHECK(previous_g < 1e-3);
  CHECK(previous_c < 1e-3);
}

TEST_CASE("non-retarded plate forms by hand") {
  const PlateSpec plate{0.0, +1, +1};
  const double xi = 0.5;
  // On the normal axis: no lateral offset.
  const GeometryPair axis{Vector3(0, 0, 1), Vector3(0, 0, 2)};
  CHECK(plate_scattering_G_nr(axis, plate, xi).norm() == 0.0);
  const Tensor3 c = curl_plate_G_nr(axis, plate, xi);
  const double pre = 1.0 / (4.0 * kPi * xi * 27.0);
  CHECK(c(0, 0) == doctest::Approx(-pre));
  CHECK(c(1, 1) == doctest::Approx(-pre));
  CHECK(c(2, 2) == doctest::Approx(-2.0 * pre));
  CHECK(curl_plate_G_nr(axis, plate.flipped(), xi)(2, 2) == doctest::Approx(2.0 * pre));

  const GeometryPair g{Vector3(0.1, 0.2, 0.3), Vector3(0.6, -0.2, 0.5)};
  const Tensor3 nr = curl_plate_G_nr(g, plate, xi);
  const PlateFrameGeometry f = plate_frame(g, plate);
  const double rho2 = f.x * f.x + f.y * f.y;
  const double trace_oracle = (2.0 * rho2 - 4.0 * f.z_plus() * f.z_plus()) / (4.0 * kPi * xi * std::pow(f.r_plus(), 5));
  CHECK(nr.trace() == doctest::Approx(trace_oracle).epsilon(1e-13));
  CHECK(plate_scattering_G_nr(g, plate, xi)(2, 2) == 0.0);
  CHECK_THROWS_AS(plate_scattering_G_nr(GeometryPair{Vector3(0, 0, -1), Vector3(0, 0, 1)}, plate, xi),
                  SingularityError);
}

TEST_CASE("total tensor over environments") {
  const QuadratureSpec spec = default_plate_spec();
  const GeometryPair g{Vector3(0.1, 0.0, 1.0), Vector3(0.3, 0.2, 1.4)};
  const double xi = 1.0;
  CHECK(rel(total_G(g, Environment::free_space(), xi, spec), free_space_G(g, xi)) == 0.0);

  // A distant plate decouples.
  const Environment far = Environment::single_plate(-40.0, +1);
  CHECK(rel(total_G(g, far, xi, spec), free_space_G(g, xi)) < 1e-30);

  // The upper plate of a cavity is the lower one rotated by pi about a line
  // parallel to x through the mid-plane.
  const Environment cav = Environment::cavity(0.0, 2.0, +1);
  const auto rot = [](const Vector3& r) { return Vector3(r.x(), -r.y(), 2.0 - r.z()); };
  const Tensor3 q = Vector3(1, -1, -1).asDiagonal();
  const GreensBundle upper = plate_bundle(g, cav.plates[1], xi, spec).bundle;
  const GreensBundle lower = plate_bundle({rot(g.r_a), rot(g.r_b)}, cav.plates[0], xi, spec).bundle;
  CHECK(rel(upper.g, Tensor3(q * lower.g * q)) < 1e-12);
  CHECK(rel(upper.curl_left, Tensor3(q * lower.curl_left * q)) < 1e-12);

  const GreensBundle total = total_bundle(g, cav, xi, spec).bundle;
  const Tensor3 sum = free_space_G(g, xi) + upper.g + plate_bundle(g, cav.plates[0], xi, spec).bundle.g;
  CHECK(rel(total.g, sum) < 1e-14);

  CHECK_THROWS_AS(cav.check_position(Vector3(0, 0, 2.5)), SingularityError);
  CHECK_NOTHROW(cav.check_position(Vector3(0, 0, 1.5)));
  CHECK_THROWS_AS(Environment({{PlateSpec{0.0, 2, 1}}}).validate(), ConfigError);
  CHECK_THROWS_AS(Environment({{PlateSpec{1.0, 1, 1}, PlateSpec{0.0, 1, -1}}}).validate(), ConfigError);
}
