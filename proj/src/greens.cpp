#include "chiralvdw/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "chiralvdw/errors.hpp"
#include "chiralvdw/finite_difference.hpp"

namespace chiralvdw {

void PlateSpec::validate() const {
  if (chirality != 1 && chirality != -1) throw ConfigError("plate chirality must be +1 or -1");
  if (normal != 1 && normal != -1) throw ConfigError("plate normal must be +1 or -1");
  if (!std::isfinite(z0)) throw ConfigError("plate position must be finite");
}

Environment Environment::cavity(double z_low, double z_high, int chirality) {
  return {{PlateSpec{z_low, chirality, +1}, PlateSpec{z_high, chirality, -1}}};
}

Environment Environment::with_chirality_flipped() const {
  Environment out = *this;
  for (auto& p : out.plates) p = p.flipped();
  return out;
}

void Environment::validate() const {
  if (plates.size() > 2) throw ConfigError("environment supports at most two plates");
  for (const auto& p : plates) p.validate();
  if (plates.size() == 2) {
    const PlateSpec& a = plates[0];
    const PlateSpec& b = plates[1];
    if (a.z0 == b.z0) throw ConfigError("cavity plates coincide");
    const PlateSpec& low = a.z0 < b.z0 ? a : b;
    const PlateSpec& high = a.z0 < b.z0 ? b : a;
    if (low.normal != 1 || high.normal != -1) throw ConfigError("cavity plates must face inward");
  }
}

void Environment::check_position(const Vector3& r) const {
  for (const auto& p : plates) {
    if (!(p.height(r) > 0.0)) {
      throw SingularityError("position " + format_point(r) + " is not in front of the plate at z = " +
                             std::to_string(p.z0));
    }
  }
}

double PlateFrameGeometry::r_plus() const { return std::sqrt(x * x + y * y + z_plus() * z_plus()); }

PlateFrameGeometry plate_frame(const GeometryPair& g, const PlateSpec& plate) {
  PlateFrameGeometry f;
  const Vector3 sep = g.separation();
  f.x = sep.x();
  f.y = plate.normal > 0 ? sep.y() : -sep.y();
  f.z_a = plate.height(g.r_a);
  f.z_b = plate.height(g.r_b);
  if (!(f.z_a > 0.0) || !(f.z_b > 0.0)) {
    throw SingularityError("plate tensor: both molecules must lie strictly in front of the plate at z = " +
                           std::to_string(plate.z0));
  }
  return f;
}

Tensor3 from_plate_frame(const Tensor3& t, const PlateSpec& plate) {
  if (plate.normal > 0) return t;
  const Eigen::Vector3d q(1.0, -1.0, -1.0);
  return q.asDiagonal() * t * q.asDiagonal();
}

GreensBundle& GreensBundle::operator+=(const GreensBundle& o) {
  g += o.g;
  curl_left += o.curl_left;
  curl_right += o.curl_right;
  curl_both += o.curl_both;
  return *this;
}

namespace {

void require_separation(const GeometryPair& g, double xi) {
  if (!(g.distance() > 0.0)) throw SingularityError("free-space Green tensor: r_A and r_B coincide");
  if (!(xi > 0.0)) throw std::invalid_argument("Green tensor: xi must be positive");
}

}  // namespace

Tensor3 free_space_G(const GeometryPair& g, double xi) {
  require_separation(g, xi);
  const double r = g.distance();
  const Vector3 e = g.unit();
  const double x = xi * r;
  const double a = 1.0 + x + x * x;
  const double b = 3.0 + 3.0 * x + x * x;
  const double pre = std::exp(-x) / (4.0 * kPi * xi * xi * r * r * r);
  return pre * (a * Tensor3::Identity() - b * e * e.transpose());
}

// G = (I - grad grad / xi^2) g(R) with g = exp(-xi R)/(4 pi R), R = r_B - r_A.
// Only the I g part survives a curl: nabla_A x G = -g'(R) [e]_x.
Tensor3 curl_free_space_G(const GeometryPair& g, double xi) {
  require_separation(g, xi);
  const double r = g.distance();
  const double x = xi * r;
  const double minus_gprime = std::exp(-x) * (1.0 + x) / (4.0 * kPi * r * r);
  return minus_gprime * cross_matrix(Vector3(g.unit()));
}

GreensBundle free_space_bundle(const GeometryPair& g, double xi) {
  GreensBundle b;
  b.g = free_space_G(g, xi);
  b.curl_left = curl_free_space_G(g, xi);
  b.curl_right = -b.curl_left;
  // nabla x nabla x G = xi^2 G away from the source point.
  b.curl_both = xi * xi * b.g;
  return b;
}

namespace {

// Plate-frame spectral sums. Parts are stored divided by their natural length
// scale (z_+^0, z_+^-1, z_+^-1, z_+^-2) so one norm can judge convergence.
struct SpectralBundle {
  CTensor3 g = CTensor3::Zero();
  CTensor3 curl_left = CTensor3::Zero();
  CTensor3 curl_right = CTensor3::Zero();
  CTensor3 curl_both = CTensor3::Zero();

  SpectralBundle& operator+=(const SpectralBundle& o) {
    g += o.g;
    curl_left += o.curl_left;
    curl_right += o.curl_right;
    curl_both += o.curl_both;
    return *this;
  }
  friend SpectralBundle operator-(SpectralBundle a, const SpectralBundle& b) {
    a.g -= b.g;
    a.curl_left -= b.curl_left;
    a.curl_right -= b.curl_right;
    a.curl_both -= b.curl_both;
    return a;
  }
  friend SpectralBundle operator*(SpectralBundle a, double w) {
    a.g *= w;
    a.curl_left *= w;
    a.curl_right *= w;
    a.curl_both *= w;
    return a;
  }
};

double magnitude(const SpectralBundle& b) {
  return std::sqrt(b.g.squaredNorm() + b.curl_left.squaredNorm() + b.curl_right.squaredNorm() +
                   b.curl_both.squaredNorm());
}

bool all_finite(const SpectralBundle& b) {
  return b.g.allFinite() && b.curl_left.allFinite() && b.curl_right.allFinite() && b.curl_both.allFinite();
}

// The amplitudes are trigonometric polynomials of degree <= 2 in phi, so
// sampling them at kAngles points and weighting with Bessel functions
// integrates exp(-i k rho cos(phi - phi0)) f(phi) exactly:
//   int f e^{-i z cos(phi - phi0)} dphi = 2 pi sum_n f_n (-i)^n J_n(z) e^{i n phi0}.
constexpr int kAngles = 8;

struct AngleTable {
  std::array<double, kAngles> cos{}, sin{};
  std::array<std::array<Complex, 8>, kAngles> phase{};  // e^{-i n phi_j}, n = -3..4
  AngleTable() {
    for (int j = 0; j < kAngles; ++j) {
      const double phi = 2.0 * kPi * j / kAngles;
      cos[j] = std::cos(phi);
      sin[j] = std::sin(phi);
      for (int n = -3; n <= 4; ++n) phase[j][n + 3] = std::exp(Complex(0.0, -n * phi));
    }
  }
};

const AngleTable& angle_table() {
  static const AngleTable table;
  return table;
}

// J_0..J_4; upward recurrence is stable once z exceeds the order.
std::array<double, 5> bessel_j04(double z) {
  std::array<double, 5> j{};
  if (z == 0.0) {
    j[0] = 1.0;
    return j;
  }
  if (z < 5.0) {
    for (int n = 0; n < 5; ++n) j[n] = std::cyl_bessel_j(double(n), z);
    return j;
  }
  j[0] = std::cyl_bessel_j(0.0, z);
  j[1] = std::cyl_bessel_j(1.0, z);
  for (int n = 1; n < 4; ++n) j[n + 1] = 2.0 * n / z * j[n] - j[n - 1];
  return j;
}

std::array<Complex, kAngles> angular_weights(double z, const std::array<Complex, 8>& e_in_phi0) {
  const auto jz = bessel_j04(z);
  static const Complex minus_i_pow[5] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}, {1, 0}};
  // 2 pi (-i)^n J_n e^{i n phi0} / N; J_{-n}(z) (-i)^{-n} = (-i)^n J_n(z).
  std::array<Complex, 8> coef;
  for (int n = -3; n <= 4; ++n) {
    coef[n + 3] = (2.0 * kPi / kAngles) * minus_i_pow[std::abs(n)] * jz[std::abs(n)] * e_in_phi0[n + 3];
  }
  const AngleTable& t = angle_table();
  std::array<Complex, kAngles> w{};
  for (int j = 0; j < kAngles; ++j) {
    for (int n = 0; n < 8; ++n) w[j] += coef[n] * t.phase[j][n];
  }
  return w;
}

class PlateIntegrand {
 public:
  PlateIntegrand(const PlateFrameGeometry& f, const PlateSpec& plate, double xi)
      : zp_(f.z_plus()), xi_(xi), rsp_(plate.r_s_to_p()), rps_(plate.r_p_to_s()),
        rho_(std::hypot(f.x, f.y)) {
    const double phi0 = std::atan2(f.y, f.x);
    for (int n = -3; n <= 4; ++n) e_in_phi0_[n + 3] = std::exp(Complex(0.0, n * phi0));
  }

  // phi-integrated spectral density at k_par.
  SpectralBundle operator()(double k) const {
    const double kappa = std::sqrt(xi_ * xi_ + k * k);
    const double radial = k / kappa * std::exp(-kappa * zp_) / (8.0 * kPi * kPi);
    if (radial == 0.0) return SpectralBundle{};
    const Complex I(0.0, 1.0);
    const auto weights = angular_weights(k * rho_, e_in_phi0_);
    const AngleTable& table = angle_table();
    auto at_angle = [&](int j, Complex phase) {
      const double c = table.cos[j];
      const double s = table.sin[j];
      const CVector3 e_s(s, -c, 0.0);
      const CVector3 e_p_up = CVector3(-kappa * c, -kappa * s, -I * k) / xi_;
      const CVector3 e_p_down = CVector3(kappa * c, kappa * s, -I * k) / xi_;
      // i k_+ x (...) acting on r_A and (...) x i q acting on r_B.
      const CVector3 ik_plus(I * k * c, I * k * s, -kappa);
      const CVector3 iq(-I * k * c, -I * k * s, -kappa);
      // Eigen's cross() conjugates complex results, so use the cross matrix.
      const CTensor3 left = cross_matrix(ik_plus);
      const CTensor3 right = cross_matrix(iq);
      const CVector3 left_p = left * e_p_up;
      const CVector3 left_s = left * e_s;
      const CVector3 right_s = -(right * e_s);
      const CVector3 right_p = -(right * e_p_down);

      SpectralBundle b;
      const Complex w1 = phase * rsp_;
      const Complex w2 = phase * rps_;
      b.g = w1 * dyadic(e_p_up, e_s) + w2 * dyadic(e_s, e_p_down);
      b.curl_left = (w1 * dyadic(left_p, e_s) + w2 * dyadic(left_s, e_p_down)) * zp_;
      b.curl_right = (w1 * dyadic(e_p_up, right_s) + w2 * dyadic(e_s, right_p)) * zp_;
      b.curl_both = (w1 * dyadic(left_p, right_s) + w2 * dyadic(left_s, right_p)) * (zp_ * zp_);
      return b;
    };
    SpectralBundle sum;
    for (int j = 0; j < kAngles; ++j) sum += at_angle(j, weights[j]);
    return sum * radial;
  }

 private:
  double zp_, xi_, rsp_, rps_, rho_;
  std::array<Complex, 8> e_in_phi0_{};
};

// exp(-kappa z_+) relative to its value at k = 0 drops below e^-40 beyond
// k_max. Panels are graded geometrically out of the kappa ~ xi knee, then kept
// narrower than both the decay length and one lateral oscillation 2 pi / rho.
std::vector<double> k_breaks(double xi, double zp, double rho) {
  constexpr double kDecay = 40.0;
  const double kappa_max = xi + kDecay / zp;
  const double k_max = std::sqrt(kappa_max * kappa_max - xi * xi);
  double width = 4.0 / zp;
  if (rho > 0.0) width = std::min(width, 2.0 * kPi / rho);
  std::vector<double> breaks{0.0};
  double k = std::min(xi, width);
  while (k < width && k < k_max) {
    breaks.push_back(k);
    k *= 2.0;
  }
  k = breaks.back();
  const int uniform = static_cast<int>(std::ceil((k_max - k) / width));
  const double step = (k_max - k) / std::max(uniform, 1);
  for (int i = 1; i <= uniform; ++i) breaks.push_back(k + step * i);
  if (breaks.size() < 2) breaks.push_back(k_max);
  return breaks;
}

}  // namespace

QuadratureSpec default_plate_spec() {
  QuadratureSpec spec;
  spec.nodes = 8;
  spec.relative_tolerance = 1e-10;
  spec.max_refinements = 5;
  return spec;
}

GreensResult plate_bundle(const GeometryPair& g, const PlateSpec& plate, double xi, const QuadratureSpec& spec) {
  if (!(xi > 0.0)) throw std::invalid_argument("plate tensor: xi must be positive");
  plate.validate();
  const PlateFrameGeometry frame = plate_frame(g, plate);
  const double zp = frame.z_plus();
  PlateIntegrand integrand(frame, plate, xi);

  const auto res = integrate_panels(integrand, k_breaks(xi, zp, std::hypot(frame.x, frame.y)), spec);
  const SpectralBundle& total = res.value;
  const double scale = magnitude(total);
  const double imag = std::sqrt(total.g.imag().squaredNorm() + total.curl_left.imag().squaredNorm() +
                                total.curl_right.imag().squaredNorm() + total.curl_both.imag().squaredNorm());
  if (imag > 1e3 * spec.relative_tolerance * scale + 1e-300) {
    throw NumericalError("plate tensor: imaginary residue " + std::to_string(imag / scale) +
                         " (relative) exceeds tolerance at xi = " + std::to_string(xi));
  }

  GreensResult out;
  out.error = res.error / std::max(scale, 1e-300);
  out.bundle.g = from_plate_frame(total.g.real(), plate);
  out.bundle.curl_left = from_plate_frame(total.curl_left.real() / zp, plate);
  out.bundle.curl_right = from_plate_frame(total.curl_right.real() / zp, plate);
  out.bundle.curl_both = from_plate_frame(total.curl_both.real() / (zp * zp), plate);
  return out;
}

Tensor3 plate_scattering_G(const GeometryPair& g, const PlateSpec& plate, double xi, const QuadratureSpec& spec) {
  return plate_bundle(g, plate, xi, spec).bundle.g;
}

Tensor3 curl_plate_G(const GeometryPair& g, const PlateSpec& plate, double xi, const QuadratureSpec& spec) {
  return plate_bundle(g, plate, xi, spec).bundle.curl_left;
}

Tensor3 plate_scattering_G_nr(const GeometryPair& g, const PlateSpec& plate, double xi) {
  plate.validate();
  const PlateFrameGeometry f = plate_frame(g, plate);
  const double x = f.x;
  const double y = f.y;
  const double zp = f.z_plus();
  const double rp = f.r_plus();
  // (r_+^2 (2 r_+ - 3 z_+) + z_+^3) / rho^4 written without cancellation.
  const double u = (x * x + y * y) / (rp + zp);
  const double q = (3.0 * zp + 2.0 * u) / ((rp + zp) * (rp + zp));
  Tensor3 m;
  m << -2.0 * x * y * q, (x * x - y * y) * q, -y,
       (x * x - y * y) * q, 2.0 * x * y * q, x,
       y, -x, 0.0;
  const double pre = plate.chirality / (4.0 * kPi * xi * rp * rp * rp);
  return from_plate_frame(pre * m, plate);
}

Tensor3 curl_plate_G_nr(const GeometryPair& g, const PlateSpec& plate, double xi) {
  plate.validate();
  const PlateFrameGeometry f = plate_frame(g, plate);
  const double x = f.x;
  const double y = f.y;
  const double z = f.z_plus();
  const double rp = f.r_plus();
  Tensor3 m;
  m << 2 * x * x - y * y - z * z, 3 * x * y, 3 * x * z,
       3 * x * y, -x * x + 2 * y * y - z * z, 3 * y * z,
       -3 * x * z, -3 * y * z, x * x + y * y - 2 * z * z;
  const double pre = plate.chirality / (4.0 * kPi * xi * std::pow(rp, 5));
  return from_plate_frame(pre * m, plate);
}

GreensResult total_bundle(const GeometryPair& g, const Environment& env, double xi, const QuadratureSpec& spec) {
  GreensResult out;
  out.bundle = free_space_bundle(g, xi);
  for (const auto& plate : env.plates) {
    const GreensResult p = plate_bundle(g, plate, xi, spec);
    out.bundle += p.bundle;
    out.error = std::max(out.error, p.error);
  }
  return out;
}

Tensor3 total_G(const GeometryPair& g, const Environment& env, double xi, const QuadratureSpec& spec) {
  return total_bundle(g, env, xi, spec).bundle.g;
}

Tensor3 total_curl_G(const GeometryPair& g, const Environment& env, double xi, const QuadratureSpec& spec) {
  return total_bundle(g, env, xi, spec).bundle.curl_left;
}

}  // namespace chiralvdw
