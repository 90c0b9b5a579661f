#include "chiralvdw/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chiralvdw/errors.hpp"
#include "chiralvdw/finite_difference.hpp"

namespace chiralvdw {

void PotentialSpec::validate() const {
  xi.validate();
  plate.validate();
  if (!(component_floor >= 0.0) || component_floor >= 1.0) {
    throw std::invalid_argument("potential spec: component_floor must lie in [0, 1)");
  }
}

int quadruple_index(const Quadruple& q) {
  int i = 0;
  for (int l : q) {
    if (l != 0 && l != 1) throw std::invalid_argument("index quadruple entries must be 0 or 1");
    i = 2 * i + l;
  }
  return i;
}

Quadruple quadruple_from_index(int i) {
  if (i < 0 || i > 15) throw std::invalid_argument("quadruple index out of range: " + std::to_string(i));
  return {(i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1};
}

Bucket bucket_of(const Quadruple& q) {
  const int magnetic = q[0] + q[1] + q[2] + q[3];
  switch (magnetic) {
    case 0: return Bucket::EE;
    case 1: return Bucket::CE;
    case 2: return (q[0] != q[1]) ? Bucket::CC : Bucket::EM;
    case 3: return Bucket::CM;
    default: return Bucket::MM;
  }
}

const char* bucket_name(Bucket b) {
  switch (b) {
    case Bucket::EE: return "EE";
    case Bucket::CE: return "CE";
    case Bucket::CC: return "CC";
    case Bucket::EM: return "EM";
    case Bucket::CM: return "CM";
    case Bucket::MM: return "MM";
  }
  return "?";
}

GreensSweep::GreensSweep(GeometryPair g, Environment env, QuadratureSpec plate_spec)
    : geometry_(std::move(g)), env_(std::move(env)), plate_spec_(plate_spec) {
  env_.validate();
  env_.check_position(geometry_.r_a);
  env_.check_position(geometry_.r_b);
  if (!(geometry_.distance() > 0.0)) {
    throw SingularityError("molecules A and B coincide at " + format_point(geometry_.r_a));
  }
}

const GreensResult& GreensSweep::at(double xi) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = cache_.find(xi);
    if (it != cache_.end()) return *it->second;
  }
  auto fresh = std::make_unique<GreensResult>(total_bundle(geometry_, env_, xi, plate_spec_));
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = cache_.emplace(xi, std::move(fresh));
  return *it->second;
}

std::size_t GreensSweep::cached() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

double xi_scale(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                const PotentialSpec& spec) {
  if (!spec.auto_scale) return spec.xi.scale;
  const double omega = std::min(a.dominant_frequency(), b.dominant_frequency());
  const double r = g.distance();
  if (!(r > 0.0)) return omega;
  // Short range: the integrand falls off at omega and is cut again at 1/r;
  // the geometric mean puts nodes in both regions.
  return 1.0 / r < omega ? 1.0 / r : std::sqrt(omega / r);
}

namespace {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
struct ComponentIntegral {
  Vec<N> value;
  Vec<N> error;
};

// Semi-infinite Gauss-Legendre with doubling; every component must converge
// relative to itself, or to `floor` times the largest component if smaller.
template <int N, class F>
ComponentIntegral<N> integrate_components(F&& f, const QuadratureSpec& spec, double floor, const char* who) {
  spec.validate();
  const double s = spec.scale;
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument(std::string(who) + ": bad frequency scale");
  auto map = [s](double u, double w) {
    const double t = 0.5 * (u + 1.0);
    const double one_minus = 1.0 - t;
    return std::pair<double, double>{s * t / one_minus, 0.5 * w * s / (one_minus * one_minus)};
  };
  auto pass = [&](int n) { return Vec<N>(detail::gauss_pass(f, map, n, who)); };
  int n = spec.nodes;
  Vec<N> coarse = pass(n);
  Vec<N> diff = Vec<N>::Zero();
  for (int level = 0; level <= spec.max_refinements; ++level) {
    n *= 2;
    const Vec<N> fine = pass(n);
    diff = (fine - coarse).cwiseAbs();
    const double largest = fine.cwiseAbs().maxCoeff();
    bool ok = true;
    for (int c = 0; c < N; ++c) {
      const double tol = std::max(spec.relative_tolerance * std::abs(fine(c)), floor * largest);
      if (diff(c) > tol + spec.absolute_tolerance) ok = false;
    }
    if (ok) return {fine, diff};
    coarse = fine;
  }
  throw QuadratureError(std::string(who) + ": frequency integral did not converge after " +
                            std::to_string(spec.max_refinements) + " refinements (estimate " +
                            std::to_string(coarse.cwiseAbs().maxCoeff()) + ", error " +
                            std::to_string(diff.maxCoeff()) + ")",
                        coarse.cwiseAbs().maxCoeff(), diff.maxCoeff());
}

// G^{l l'}(A, B) and G^{l l'}(B, A) from one bundle, using reciprocity
// G(B,A) = G(A,B)^T, nabla_B x G(B,A) = -(G(A,B) x nabla_B)^T, (G x nabla)(B,A) = -(nabla_A x G)^T.
struct DressedTensors {
  Tensor3 ab[2][2];
  Tensor3 ba[2][2];

  DressedTensors(const GreensBundle& b, double xi) {
    ab[0][0] = xi * xi * b.g;
    ab[1][0] = -xi * b.curl_left;
    ab[0][1] = -xi * b.curl_right;
    ab[1][1] = b.curl_both;
    ba[0][0] = xi * xi * b.g.transpose();
    ba[1][0] = xi * b.curl_right.transpose();
    ba[0][1] = xi * b.curl_left.transpose();
    ba[1][1] = b.curl_both.transpose();
  }
};

struct PairSetup {
  GreensSweep sweep;
  QuadratureSpec xi_spec;

  PairSetup(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g, const Environment& env,
            const PotentialSpec& spec)
      : sweep(g, env, spec.plate), xi_spec(spec.xi.with_scale(xi_scale(a, b, g, spec))) {
    spec.validate();
  }
};

template <int N>
EnergyResult single(const ComponentIntegral<N>& r, int c, double plate_rel) {
  return {r.value(c), r.error(c) + plate_rel * std::abs(r.value(c))};
}

// Worst plate-quadrature relative error seen among cached nodes.
double worst_plate_error(const GreensSweep& sweep, const std::vector<double>& nodes) {
  double e = 0.0;
  for (double xi : nodes) e = std::max(e, sweep.at(xi).error);
  return e;
}

// Tracks the xi nodes the kernel was evaluated on (single-threaded use).
struct NodeLog {
  std::vector<double> nodes;
  void add(double xi) { nodes.push_back(xi); }
};

}  // namespace

EnergyResult potential_EE(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                          const Environment& env, const PotentialSpec& spec) {
  PairSetup setup(a, b, g, env, spec);
  NodeLog log;
  auto kernel = [&](double xi) {
    log.add(xi);
    const Tensor3& G = setup.sweep.at(xi).bundle.g;
    const Tensor3 aa = response_tensor(a, 0, 0, xi);
    const Tensor3 ab = response_tensor(b, 0, 0, xi);
    const double tr = (aa * G * ab * G.transpose()).trace();
    return Vec<1>(-std::pow(xi, 4) * tr / (2.0 * kPi));
  };
  const auto r = integrate_components<1>(kernel, setup.xi_spec, spec.component_floor, "potential_EE");
  return single(r, 0, worst_plate_error(setup.sweep, log.nodes));
}

namespace {

// Same transitions with every rotatory strength given one sign: its chiral
// response never crosses zero, so norms built from it are smooth in xi.
PolarizabilityModel magnitude_model(const PolarizabilityModel& m) {
  std::vector<Transition> ts = m.transitions();
  for (Transition& t : ts) {
    if (t.d.dot(t.m_imag) > 0.0) t.m_imag = -t.m_imag;
  }
  return PolarizabilityModel(m.name(), ts, +1, m.isotropic());
}

}  // namespace

EnergyResult potential_CE(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                          const Environment& env, const PotentialSpec& spec) {
  PairSetup setup(a, b, g, env, spec);
  const PolarizabilityModel a_mag = magnitude_model(a);
  NodeLog log;
  auto kernel = [&](double xi) {
    log.add(xi);
    const GreensBundle& gb = setup.sweep.at(xi).bundle;
    const Tensor3 chi = response_tensor(a, 0, 1, xi);
    const Tensor3 ab = response_tensor(b, 0, 0, xi);
    const double tr = (chi * gb.curl_left * ab * gb.g.transpose()).trace();
    // Second component is a smooth magnitude scale for |tr|; it sets the
    // absolute tolerance when the energy vanishes by symmetry.
    const double bound = response_tensor(a_mag, 0, 1, xi).norm() * gb.curl_left.norm() * ab.norm() * gb.g.norm();
    return Vec<2>(std::pow(xi, 3) * tr / kPi, std::pow(xi, 3) * bound / kPi);
  };
  const auto r = integrate_components<2>(kernel, setup.xi_spec, spec.component_floor, "potential_CE");
  return single(r, 0, worst_plate_error(setup.sweep, log.nodes));
}

EnergyResult potential_CC(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                          const Environment& env, const PotentialSpec& spec) {
  PairSetup setup(a, b, g, env, spec);
  const PolarizabilityModel a_mag = magnitude_model(a), b_mag = magnitude_model(b);
  NodeLog log;
  auto kernel = [&](double xi) {
    log.add(xi);
    const GreensBundle& gb = setup.sweep.at(xi).bundle;
    const Tensor3 chi_a = response_tensor(a, 0, 1, xi);
    const Tensor3 chi_b = response_tensor(b, 0, 1, xi);
    const Tensor3 chi_b_me = response_tensor(b, 1, 0, xi);
    const Tensor3 curl_ba = -gb.curl_right.transpose();
    const double t1 = (chi_a * gb.curl_left * chi_b * curl_ba).trace();
    const double t2 = (chi_a * gb.curl_both * chi_b_me * gb.g.transpose()).trace();
    const double bound = response_tensor(a_mag, 0, 1, xi).norm() * response_tensor(b_mag, 0, 1, xi).norm() *
                         (gb.curl_left.norm() * curl_ba.norm() + gb.curl_both.norm() * gb.g.norm());
    return Vec<2>(-xi * xi * (t1 + t2) / kPi, xi * xi * bound / kPi);
  };
  const auto r = integrate_components<2>(kernel, setup.xi_spec, spec.component_floor, "potential_CC");
  return single(r, 0, worst_plate_error(setup.sweep, log.nodes));
}

PotentialSet potential_set(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                           const Environment& env, const PotentialSpec& spec) {
  PairSetup setup(a, b, g, env, spec);
  NodeLog log;
  auto kernel = [&](double xi) {
    log.add(xi);
    const GreensBundle& gb = setup.sweep.at(xi).bundle;
    const Tensor3 alpha_a = response_tensor(a, 0, 0, xi);
    const Tensor3 alpha_b = response_tensor(b, 0, 0, xi);
    const Tensor3 chi_a = response_tensor(a, 0, 1, xi);
    const Tensor3 chi_b = response_tensor(b, 0, 1, xi);
    const Tensor3 chi_b_me = response_tensor(b, 1, 0, xi);
    const Tensor3 g_ba = gb.g.transpose();
    const Tensor3 curl_ba = -gb.curl_right.transpose();  // nabla_B x G(B, A)
    Vec<3> out;
    out(0) = -std::pow(xi, 4) * (alpha_a * gb.g * alpha_b * g_ba).trace() / (2.0 * kPi);
    out(1) = std::pow(xi, 3) *
             ((chi_a * gb.curl_left * alpha_b * g_ba).trace() + (chi_b * curl_ba * alpha_a * gb.g).trace()) / kPi;
    out(2) = -xi * xi *
             ((chi_a * gb.curl_left * chi_b * curl_ba).trace() + (chi_a * gb.curl_both * chi_b_me * g_ba).trace()) /
             kPi;
    return out;
  };
  const auto r = integrate_components<3>(kernel, setup.xi_spec, spec.component_floor, "potential_set");
  const double plate_rel = worst_plate_error(setup.sweep, log.nodes);
  return {single(r, 0, plate_rel), single(r, 1, plate_rel), single(r, 2, plate_rel)};
}

namespace {

Vec<16> quadruple_kernel(const PolarizabilityModel& a, const PolarizabilityModel& b, const GreensBundle& gb,
                         double xi) {
  const DressedTensors t(gb, xi);
  Tensor3 pa[2][2];
  Tensor3 pb[2][2];
  for (int l = 0; l < 2; ++l) {
    for (int m = 0; m < 2; ++m) {
      pa[l][m] = response_tensor(a, l, m, xi);
      pb[l][m] = response_tensor(b, l, m, xi);
    }
  }
  Vec<16> out;
  for (int i = 0; i < 16; ++i) {
    const Quadruple q = quadruple_from_index(i);
    const double tr = (pa[q[0]][q[1]] * t.ab[q[1]][q[2]] * pb[q[2]][q[3]] * t.ba[q[3]][q[0]]).trace();
    out(i) = -tr / (2.0 * kPi);
  }
  return out;
}

}  // namespace

EnergyResult potential_general(const PolarizabilityModel& a, const PolarizabilityModel& b, const Quadruple& q,
                               const GeometryPair& g, const Environment& env, const PotentialSpec& spec) {
  const int index = quadruple_index(q);
  PairSetup setup(a, b, g, env, spec);
  NodeLog log;
  auto kernel = [&](double xi) {
    log.add(xi);
    return Vec<1>(quadruple_kernel(a, b, setup.sweep.at(xi).bundle, xi)(index));
  };
  const auto r = integrate_components<1>(kernel, setup.xi_spec, spec.component_floor, "potential_general");
  return single(r, 0, worst_plate_error(setup.sweep, log.nodes));
}

PotentialBreakdown potential_breakdown(const PolarizabilityModel& a, const PolarizabilityModel& b,
                                       const GeometryPair& g, const Environment& env, const PotentialSpec& spec) {
  PairSetup setup(a, b, g, env, spec);
  NodeLog log;
  auto kernel = [&](double xi) {
    log.add(xi);
    return quadruple_kernel(a, b, setup.sweep.at(xi).bundle, xi);
  };
  const auto r = integrate_components<16>(kernel, setup.xi_spec, spec.component_floor, "potential_breakdown");
  const double plate_rel = worst_plate_error(setup.sweep, log.nodes);

  PotentialBreakdown out;
  for (int i = 0; i < 16; ++i) {
    out.quadruples[i] = r.value(i);
    const double err = r.error(i) + plate_rel * std::abs(r.value(i));
    switch (bucket_of(quadruple_from_index(i))) {
      case Bucket::EE: out.U_EE += r.value(i); out.errors.EE += err; break;
      case Bucket::CE: out.U_CE += r.value(i); out.errors.CE += err; break;
      case Bucket::CC: out.U_CC += r.value(i); out.errors.CC += err; break;
      case Bucket::EM: out.U_EM += r.value(i); out.errors.EM += err; break;
      case Bucket::CM: out.U_CM += r.value(i); out.errors.CM += err; break;
      case Bucket::MM: out.U_MM += r.value(i); out.errors.MM += err; break;
    }
  }
  out.total = out.U_EE + out.U_CE + out.U_CC + out.U_EM + out.U_CM + out.U_MM;
  out.errors.total = out.errors.EE + out.errors.CE + out.errors.CC + out.errors.EM + out.errors.CM + out.errors.MM;
  return out;
}

namespace {

void require_isotropic(const PolarizabilityModel& m, const char* who) {
  if (!m.isotropic()) throw std::invalid_argument(std::string(who) + ": model '" + m.name() + "' is not isotropic");
}

template <class F>
double response_integral(F&& f, const PolarizabilityModel& a, const PolarizabilityModel& b,
                         const PotentialSpec& spec, const char* who) {
  QuadratureSpec q = spec.xi;
  if (spec.auto_scale) q.scale = std::min(a.dominant_frequency(), b.dominant_frequency());
  auto kernel = [&](double xi) { return Vec<1>(f(xi)); };
  return integrate_components<1>(kernel, q, 0.0, who).value(0);
}

}  // namespace

double integral_alpha_alpha(const PolarizabilityModel& a, const PolarizabilityModel& b, const PotentialSpec& spec) {
  return response_integral([&](double xi) { return alpha_iso(a, xi) * alpha_iso(b, xi); }, a, b, spec,
                           "integral_alpha_alpha");
}

double integral_chi_alpha(const PolarizabilityModel& a, const PolarizabilityModel& b, const PotentialSpec& spec) {
  return response_integral([&](double xi) { return chi_iso(a, xi) * alpha_iso(b, xi); }, a, b, spec,
                           "integral_chi_alpha");
}

EnergyResult potential_EE_nr(const PolarizabilityModel& a, const PolarizabilityModel& b, double r,
                             const PotentialSpec& spec) {
  require_isotropic(a, "potential_EE_nr");
  require_isotropic(b, "potential_EE_nr");
  if (!(r > 0.0)) throw SingularityError("potential_EE_nr: separation must be positive");
  const double u = -3.0 / (16.0 * std::pow(kPi, 3) * std::pow(r, 6)) * integral_alpha_alpha(a, b, spec);
  return {u, spec.xi.relative_tolerance * std::abs(u)};
}

double ce_plate_geometric_factor(const PlateFrameGeometry& f) {
  const double rho2 = f.x * f.x + f.y * f.y;
  const double dz = f.z_b - f.z_a;
  const double r2 = rho2 + dz * dz;
  const double rp2 = rho2 + f.z_plus() * f.z_plus();
  if (!(r2 > 0.0)) throw SingularityError("geometric factor: molecules coincide");
  if (!(f.z_plus() > 0.0)) throw SingularityError("geometric factor: z_+ must be positive");
  const double num = r2 * (2.0 * rp2 - 3.0 * rho2) - 3.0 * rp2 * rho2;
  return num / (std::pow(r2, 2.5) * std::pow(rp2, 2.5));
}

EnergyResult potential_CE_nr_plate(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                                   const PlateSpec& plate, const PotentialSpec& spec) {
  require_isotropic(a, "potential_CE_nr_plate");
  require_isotropic(b, "potential_CE_nr_plate");
  plate.validate();
  if (!(g.distance() > 0.0)) throw SingularityError("potential_CE_nr_plate: molecules coincide");
  const double f = ce_plate_geometric_factor(plate_frame(g, plate));
  if (!a.chiral()) return {0.0, 0.0};
  const double u = plate.chirality / (16.0 * std::pow(kPi, 3)) * integral_chi_alpha(a, b, spec) * f;
  return {u, spec.xi.relative_tolerance * std::abs(u)};
}

double cc_retardation_factor(double x) { return std::exp(-2.0 * x) * (3.0 + 6.0 * x + 4.0 * x * x); }

EnergyResult potential_CC_free_iso(const PolarizabilityModel& a, const PolarizabilityModel& b, double r,
                                   const PotentialSpec& spec) {
  require_isotropic(a, "potential_CC_free_iso");
  require_isotropic(b, "potential_CC_free_iso");
  if (!(r > 0.0)) throw SingularityError("potential_CC_free_iso: separation must be positive");
  QuadratureSpec q = spec.xi;
  if (spec.auto_scale) q.scale = std::min({a.dominant_frequency(), b.dominant_frequency(), 1.0 / r});
  auto kernel = [&](double xi) {
    return Vec<1>(chi_iso(a, xi) * chi_iso(b, xi) * cc_retardation_factor(xi * r) / (8.0 * std::pow(kPi, 3)));
  };
  const auto res = integrate_components<1>(kernel, q, 0.0, "potential_CC_free_iso");
  const double r6 = std::pow(r, 6);
  return {res.value(0) / r6, res.error(0) / r6};
}

}  // namespace chiralvdw
