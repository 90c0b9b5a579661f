#include "chiralvdw/forces.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "chiralvdw/errors.hpp"
#include "chiralvdw/finite_difference.hpp"

namespace chiralvdw {

const char* component_name(Component c) {
  switch (c) {
    case Component::EE: return "EE";
    case Component::CE: return "CE";
    case Component::CC: return "CC";
    case Component::Total: return "total";
  }
  return "?";
}

double ComponentEnergies::get(Component c) const {
  switch (c) {
    case Component::EE: return EE;
    case Component::CE: return CE;
    case Component::CC: return CC;
    case Component::Total: return total();
  }
  return 0.0;
}

Vector3 ComponentForces::get(Component c) const {
  switch (c) {
    case Component::EE: return EE;
    case Component::CE: return CE;
    case Component::CC: return CC;
    case Component::Total: return total();
  }
  return Vector3::Zero();
}

namespace {

double relative(const EnergyResult& e) { return e.value == 0.0 ? 0.0 : e.error / std::abs(e.value); }

}  // namespace

ComponentEnergies component_energies(const PolarizabilityModel& a, const PolarizabilityModel& b,
                                     const GeometryPair& g, const Environment& env, const PotentialSpec& spec,
                                     EvaluationMode mode) {
  ComponentEnergies out;
  if (mode == EvaluationMode::Full) {
    const PotentialSet set = potential_set(a, b, g, env, spec);
    out.EE = set.EE.value;
    out.CE = set.CE.value;
    out.CC = set.CC.value;
    out.error = std::max({relative(set.EE), relative(set.CE), relative(set.CC)});
    return out;
  }
  env.validate();
  env.check_position(g.r_a);
  env.check_position(g.r_b);
  const double r = g.distance();
  const EnergyResult ee = potential_EE_nr(a, b, r, spec);
  out.EE = ee.value;
  out.error = relative(ee);
  for (const PlateSpec& plate : env.plates) {
    const EnergyResult ab = potential_CE_nr_plate(a, b, g, plate, spec);
    const EnergyResult ba = potential_CE_nr_plate(b, a, g.swapped(), plate, spec);
    out.CE += ab.value + ba.value;
    out.error = std::max({out.error, relative(ab), relative(ba)});
  }
  if (a.chiral() && b.chiral()) {
    const EnergyResult cc = potential_CC_free_iso(a, b, r, spec);
    out.CC = cc.value;
    out.error = std::max(out.error, relative(cc));
  }
  return out;
}

double default_step(const GeometryPair& g, const Environment& env, double rel) {
  if (!(rel > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  double h = rel * g.distance();
  h = std::min(h, 0.25 * g.distance());
  for (const PlateSpec& p : env.plates) h = std::min(h, 0.25 * p.height(g.r_b));
  if (!(h > 0.0)) throw SingularityError("no admissible finite-difference step at " + format_point(g.r_b));
  return h;
}

ComponentForces forces_on_b(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                            const Environment& env, const PotentialSpec& spec, EvaluationMode mode, double h) {
  if (h <= 0.0) h = default_step(g, env);
  ComponentForces out;
  out.step = h;
  out.energies = component_energies(a, b, g, env, spec, mode);
  for (int k = 0; k < 3; ++k) {
    GeometryPair plus = g;
    GeometryPair minus = g;
    plus.r_b(k) += h;
    minus.r_b(k) -= h;
    ComponentEnergies ep, em;
    try {
      ep = component_energies(a, b, plus, env, spec, mode);
      em = component_energies(a, b, minus, env, spec, mode);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("force stencil at ") + format_point(g.r_b) + ": " + e.what());
    }
    out.EE(k) = -(ep.EE - em.EE) / (2.0 * h);
    out.CE(k) = -(ep.CE - em.CE) / (2.0 * h);
    out.CC(k) = -(ep.CC - em.CC) / (2.0 * h);
    out.energies.error = std::max({out.energies.error, ep.error, em.error});
  }
  return out;
}

Vector3 force(Component c, const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
              const Environment& env, const PotentialSpec& spec, EvaluationMode mode, double h) {
  return forces_on_b(a, b, g, env, spec, mode, h).get(c);
}

void ScanConfig::set_plane_grid(double x, const std::vector<double>& y_over_za, const std::vector<double>& z_over_za) {
  points.clear();
  const double za = r_a.z();
  for (double z : z_over_za) {
    for (double y : y_over_za) points.emplace_back(x, y * za, z * za);
  }
}

void ScanConfig::validate() const {
  env.validate();
  spec.validate();
  env.check_position(r_a);
  if (!(fd_relative_step > 0.0)) throw ConfigError("scan: finite-difference step must be positive");
  if (points.empty()) throw ConfigError("scan: no grid points");
}

std::size_t ScanResult::failures() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const ScanPoint& p) { return !p.ok; }));
}

namespace {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

ScanPoint scan_point(const ScanConfig& cfg, const Vector3& rb) {
  ScanPoint p;
  p.position = rb;
  try {
    const GeometryPair g{cfg.r_a, rb};
    cfg.env.check_position(rb);
    if (!(g.distance() > 0.0)) throw SingularityError("B coincides with A at " + format_point(rb));
    const ComponentForces f = forces_on_b(cfg.a, cfg.b, g, cfg.env, cfg.spec, cfg.mode,
                                          default_step(g, cfg.env, cfg.fd_relative_step));
    const Vector3 er = g.unit();
    p.energies = f.energies;
    p.force_EE = f.EE;
    p.force_CE = f.CE;
    p.er_dot_F_EE = er.dot(f.EE);
    p.er_dot_F_CE = er.dot(f.CE);
    p.ratio = p.er_dot_F_EE != 0.0 ? p.er_dot_F_CE / p.er_dot_F_EE : std::nan("");
    p.err_estimate = f.energies.error;
    p.ok = true;
  } catch (const std::exception& e) {
    p.ok = false;
    p.failure = e.what();
  }
  return p;
}

}  // namespace

ScanResult ratio_field(const ScanConfig& cfg) {
  cfg.validate();
  ScanResult out;
  out.points.resize(cfg.points.size());
  parallel_for(cfg.points.size(), cfg.threads, [&](std::size_t i) { out.points[i] = scan_point(cfg, cfg.points[i]); });
  return out;
}

double attractiveness_ratio(const PolarizabilityModel& a, const PolarizabilityModel& b, const Vector3& r_a,
                            const Vector3& r_b, const Environment& env, const PotentialSpec& spec,
                            EvaluationMode mode) {
  const GeometryPair g{r_a, r_b};
  const double h = default_step(g, env);
  const Vector3 er = g.unit();
  const ComponentEnergies plus = component_energies(a, b, {r_a, r_b + h * er}, env, spec, mode);
  const ComponentEnergies minus = component_energies(a, b, {r_a, r_b - h * er}, env, spec, mode);
  // e_r.F = -dU/ds along e_r; the common factor cancels in the ratio.
  const double ee = minus.EE - plus.EE;
  const double ce = minus.CE - plus.CE;
  if (ee == 0.0) throw NumericalError("attractiveness ratio: e_r.F^EE vanishes at " + format_point(r_b));
  return ce / ee;
}

AsymptoticRatios asymptotic_ratios(const PolarizabilityModel& a, const PolarizabilityModel& b, double z_a,
                                   const PlateSpec& plate, const PotentialSpec& spec, double far) {
  if (!(z_a > 0.0)) throw ConfigError("asymptotic ratios: z_A must be positive");
  Environment env{{plate}};
  const Vector3 ra(0, 0, plate.z0 + z_a);
  // Corrections fall off as z_A / distance; one Richardson step in 1/far removes the leading one.
  auto limit = [&](const Vector3& dir) {
    const double r1 = attractiveness_ratio(a, b, ra, ra + far * z_a * dir, env, spec, EvaluationMode::NonRetarded);
    const double r2 = attractiveness_ratio(a, b, ra, ra + 2 * far * z_a * dir, env, spec, EvaluationMode::NonRetarded);
    return 2.0 * r2 - r1;
  };
  AsymptoticRatios out;
  out.parallel = limit(Vector3(0, 1, 0));
  out.perpendicular = limit(Vector3(0, 0, 1));
  return out;
}

Calibration calibrate_chirality(const PolarizabilityModel& a, const PolarizabilityModel& b, double z_a,
                                const PlateSpec& plate, double target, const PotentialSpec& spec) {
  if (!a.chiral()) throw ConfigError("calibration: molecule '" + a.name() + "' has no chirality to rescale");
  Calibration out;
  out.before = asymptotic_ratios(a, b, z_a, plate, spec);
  // The CE energy is linear in the magnetic moments; EE does not depend on them.
  if (out.before.parallel == 0.0) throw NumericalError("calibration: parallel asymptote vanishes");
  out.magnetic_scale = target / out.before.parallel;
  out.model = a.with_magnetic_scale(out.magnetic_scale);
  out.after = asymptotic_ratios(out.model, b, z_a, plate, spec);
  return out;
}

void CavityConfig::validate() const {
  if (!(z_low < z_high)) throw ConfigError("cavity: z_low must be below z_high");
  if (chirality != 1 && chirality != -1) throw ConfigError("cavity: chirality must be +1 or -1");
  for (double z : {z_a, z_b, z_c}) {
    if (!(z > z_low && z < z_high)) throw ConfigError("cavity: species must lie strictly between the plates");
  }
  const double scale = z_high - z_low;
  const double tol = 1e-12 * scale;
  if (std::abs((z_b - z_a) - (z_c - z_b)) > tol || !(z_a < z_b)) {
    throw ConfigError("cavity: A and C must sit mirror-symmetrically about B (z_B - z_A = z_C - z_B > 0)");
  }
  if (std::abs(2.0 * z_b - (z_low + z_high)) > tol) {
    throw ConfigError("cavity: B must sit on the cavity mid-plane for the plates to be mirror-placed");
  }
  spec.validate();
}

CavityReport cavity_experiment(const CavityConfig& cfg) {
  cfg.validate();
  const Environment env = cfg.environment();
  const Vector3 ra(0, 0, cfg.z_a), rb(0, 0, cfg.z_b), rc(0, 0, cfg.z_c);
  const double h = std::min(default_step({ra, rb}, env, cfg.fd_relative_step),
                            0.25 * (cfg.z_high - cfg.z_b));
  const Vector3 dz(0, 0, h);

  struct PairForce {
    double EE, CE, CC;
  };
  auto pair_force = [&](const PolarizabilityModel& chiral, const Vector3& r_other) {
    const ComponentEnergies plus = component_energies(chiral, cfg.b, {r_other, rb + dz}, env, cfg.spec, cfg.mode);
    const ComponentEnergies minus = component_energies(chiral, cfg.b, {r_other, rb - dz}, env, cfg.spec, cfg.mode);
    return PairForce{-(plus.EE - minus.EE) / (2 * h), -(plus.CE - minus.CE) / (2 * h), -(plus.CC - minus.CC) / (2 * h)};
  };
  PairForce ab{}, cb{};
  std::thread worker([&] { cb = pair_force(cfg.c, rc); });
  try {
    ab = pair_force(cfg.a, ra);
  } catch (...) {
    worker.join();
    throw;
  }
  worker.join();

  CavityReport out;
  out.ab_EE = ab.EE;
  out.ab_CE = ab.CE;
  out.ab_CC = ab.CC;
  out.cb_EE = cb.EE;
  out.cb_CE = cb.CE;
  out.cb_CC = cb.CC;
  out.force_z = ab.EE + ab.CE + ab.CC + cb.EE + cb.CE + cb.CC;
  out.reference = std::abs(ab.EE);
  out.step = h;
  out.note =
      "pairwise (two-body) A-B and C-B forces only; three-body A-B-C terms are excluded; each plate contributes a "
      "single reflection";
  return out;
}

}  // namespace chiralvdw
