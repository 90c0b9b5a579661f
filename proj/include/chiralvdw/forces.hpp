#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chiralvdw/potentials.hpp"

namespace chiralvdw {

enum class Component { EE, CE, CC, Total };
const char* component_name(Component c);

// Non-retarded: free-space London EE, the single-plate closed form for CE
// summed over plates, free-space closed form for CC. Full: trace integrals
// with the complete Green tensors.
enum class EvaluationMode { NonRetarded, Full };

struct ComponentEnergies {
  double EE = 0.0, CE = 0.0, CC = 0.0;
  double error = 0.0;  // largest relative error estimate among the components
  double total() const { return EE + CE + CC; }
  double get(Component c) const;
};

ComponentEnergies component_energies(const PolarizabilityModel& a, const PolarizabilityModel& b,
                                     const GeometryPair& g, const Environment& env, const PotentialSpec& spec,
                                     EvaluationMode mode);

struct ComponentForces {
  Vector3 EE = Vector3::Zero(), CE = Vector3::Zero(), CC = Vector3::Zero();
  ComponentEnergies energies;  // at the unshifted geometry
  double step = 0.0;
  Vector3 total() const { return EE + CE + CC; }
  Vector3 get(Component c) const;
};

// Finite-difference step: rel * |r|, kept below a quarter of |r| and of B's
// height above every plate.
double default_step(const GeometryPair& g, const Environment& env, double rel = 1e-4);

// F_B = -grad_B U by central differences (h <= 0 selects default_step).
ComponentForces forces_on_b(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                            const Environment& env, const PotentialSpec& spec, EvaluationMode mode, double h = 0.0);
Vector3 force(Component c, const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
              const Environment& env, const PotentialSpec& spec, EvaluationMode mode, double h = 0.0);

struct ScanConfig {
  PolarizabilityModel a, b;
  Vector3 r_a = Vector3(0, 0, 1);
  std::vector<Vector3> points;  // positions of B
  Environment env;
  PotentialSpec spec;
  EvaluationMode mode = EvaluationMode::NonRetarded;
  double fd_relative_step = 1e-4;
  unsigned threads = 0;  // 0 = hardware concurrency

  // B at (x, y_i z_A, z_j z_A) for all pairs, y fastest, in the order given.
  void set_plane_grid(double x, const std::vector<double>& y_over_za, const std::vector<double>& z_over_za);
  void validate() const;
};

struct ScanPoint {
  Vector3 position = Vector3::Zero();
  ComponentEnergies energies;
  Vector3 force_EE = Vector3::Zero(), force_CE = Vector3::Zero();
  double er_dot_F_EE = 0.0, er_dot_F_CE = 0.0;
  double ratio = 0.0;  // e_r.F^CE / e_r.F^EE
  double err_estimate = 0.0;
  bool ok = false;
  std::string failure;
};

struct ScanResult {
  std::vector<ScanPoint> points;  // in config order
  std::size_t failures() const;
};

ScanResult ratio_field(const ScanConfig& cfg);

// e_r.F^CE / e_r.F^EE for molecule B at r_a + distance * direction.
double attractiveness_ratio(const PolarizabilityModel& a, const PolarizabilityModel& b, const Vector3& r_a,
                            const Vector3& r_b, const Environment& env, const PotentialSpec& spec,
                            EvaluationMode mode);

struct AsymptoticRatios {
  double parallel = 0.0;       // B along y at large y / z_A
  double perpendicular = 0.0;  // B along z at large z / z_A
  double quotient() const { return parallel / perpendicular; }
};

// Non-retarded asymptotes for A at height z_a above a single plate, from B at
// far * z_a and 2 far * z_a extrapolated to infinite distance.
AsymptoticRatios asymptotic_ratios(const PolarizabilityModel& a, const PolarizabilityModel& b, double z_a,
                                   const PlateSpec& plate, const PotentialSpec& spec = {}, double far = 1e3);

struct Calibration {
  PolarizabilityModel model;  // A with rescaled magnetic moments
  double magnetic_scale = 1.0;
  AsymptoticRatios before, after;
};

// Rescales the magnetic moments of A so the parallel asymptote equals `target`.
Calibration calibrate_chirality(const PolarizabilityModel& a, const PolarizabilityModel& b, double z_a,
                                const PlateSpec& plate, double target, const PotentialSpec& spec = {});

struct CavityConfig {
  PolarizabilityModel a, b, c;
  double z_low = 0.0, z_high = 1.0;
  int chirality = +1;
  double z_a = 0.25, z_b = 0.5, z_c = 0.75;  // on the axis x = y = 0
  PotentialSpec spec;
  EvaluationMode mode = EvaluationMode::Full;
  double fd_relative_step = 1e-4;

  Environment environment() const { return Environment::cavity(z_low, z_high, chirality); }
  void validate() const;  // rejects asymmetric placements
};

struct CavityReport {
  double force_z = 0.0;  // total z force on B
  double ab_EE = 0.0, ab_CE = 0.0, ab_CC = 0.0;
  double cb_EE = 0.0, cb_CE = 0.0, cb_CC = 0.0;
  double reference = 0.0;  // |F_z^EE| of the A-B pair alone
  double step = 0.0;
  std::string note;
};

CavityReport cavity_experiment(const CavityConfig& cfg);

}  // namespace chiralvdw
