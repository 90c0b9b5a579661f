#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>

#include "chiralvdw/greens.hpp"
#include "chiralvdw/polarizability.hpp"
#include "chiralvdw/quadrature.hpp"

namespace chiralvdw {

struct PotentialSpec {
  QuadratureSpec xi;                         // imaginary-frequency integral
  QuadratureSpec plate = default_plate_spec();
  // x = s t / (1 - t) with s = 1/r at long range and sqrt(omega / r) when
  // 1/r exceeds the smaller dominant transition frequency omega, unless
  // auto_scale is false, in which case xi.scale is used as given.
  bool auto_scale = true;
  // Each component converges to max(relative tolerance * |value|, component_floor
  // * largest component): terms that vanish by symmetry converge in absolute terms.
  double component_floor = 1e-12;

  void validate() const;
};

struct EnergyResult {
  double value = 0.0;
  double error = 0.0;  // absolute estimate (frequency quadrature + worst plate quadrature)
};

// Index quadruple (lambda1, lambda2, lambda3, lambda4), each 0 (electric) or 1
// (magnetic); alpha_A carries (l1, l2), alpha_B carries (l3, l4).
using Quadruple = std::array<int, 4>;
int quadruple_index(const Quadruple& q);
Quadruple quadruple_from_index(int i);

// Buckets of the 16 quadruples:
//   EE: no magnetic index; CE: one (both A- and B-chiral partners);
//   CC, EM: two (mixed at both molecules / pure magnetic at one); CM: three; MM: four.
enum class Bucket { EE, CE, CC, EM, CM, MM };
Bucket bucket_of(const Quadruple& q);
const char* bucket_name(Bucket b);

struct PotentialBreakdown {
  double U_EE = 0.0, U_CE = 0.0, U_CC = 0.0, U_MM = 0.0, U_EM = 0.0, U_CM = 0.0;
  double total = 0.0;
  struct {
    double EE = 0.0, CE = 0.0, CC = 0.0, MM = 0.0, EM = 0.0, CM = 0.0, total = 0.0;
  } errors;
  std::array<double, 16> quadruples{};  // U_{l1 l2 l3 l4} by quadruple_index
};

// Green-tensor bundles for one geometry, memoised by xi so several frequency
// integrals over the same nodes reuse the plate quadratures. Thread-safe.
class GreensSweep {
 public:
  GreensSweep(GeometryPair g, Environment env, QuadratureSpec plate_spec);

  const GreensResult& at(double xi) const;
  const GeometryPair& geometry() const { return geometry_; }
  const Environment& environment() const { return env_; }
  std::size_t cached() const;

 private:
  GeometryPair geometry_;
  Environment env_;
  QuadratureSpec plate_spec_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<GreensResult>> cache_;
};

// Frequency-mapping scale used for a pair.
double xi_scale(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                const PotentialSpec& spec);

// -(1/2pi) int dxi xi^4 Tr{alpha_A G(A,B) alpha_B G(B,A)}.
EnergyResult potential_EE(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                          const Environment& env, const PotentialSpec& spec = {});
// (1/pi) int dxi xi^3 Tr{chi_A (nabla_A x G) alpha_B G(B,A)}: A chiral, B electric.
EnergyResult potential_CE(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                          const Environment& env, const PotentialSpec& spec = {});
// -(1/pi) int dxi xi^2 {Tr[chi_A (nabla_A x G) chi_B (nabla_B x G(B,A))]
//                       + Tr[chi_A (nabla_A x G x nabla_B) chi^{me}_B G(B,A)]}, chi^{me} = -chi^T.
EnergyResult potential_CC(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                          const Environment& env, const PotentialSpec& spec = {});
// -(1/2pi) int dxi Tr[alpha_A^{l1 l2} G^{l2 l3}(A,B) alpha_B^{l3 l4} G^{l4 l1}(B,A)] with
// G^{00} = xi^2 G, G^{10} = -xi nabla x G, G^{01} = -xi G x nabla', G^{11} = nabla x G x nabla'.
EnergyResult potential_general(const PolarizabilityModel& a, const PolarizabilityModel& b, const Quadruple& q,
                               const GeometryPair& g, const Environment& env, const PotentialSpec& spec = {});
// All 16 quadruples from one frequency sweep, summed into buckets.
PotentialBreakdown potential_breakdown(const PolarizabilityModel& a, const PolarizabilityModel& b,
                                       const GeometryPair& g, const Environment& env, const PotentialSpec& spec = {});

// EE, CE and CC from one shared frequency sweep. CE here includes the
// B-chiral partner term (zero when B is achiral).
struct PotentialSet {
  EnergyResult EE, CE, CC;
};
PotentialSet potential_set(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                           const Environment& env, const PotentialSpec& spec = {});

// Closed forms, isotropic models only.
// Free-space London limit: -(3 / 16 pi^3 r^6) int alpha_A alpha_B dxi.
EnergyResult potential_EE_nr(const PolarizabilityModel& a, const PolarizabilityModel& b, double r,
                             const PotentialSpec& spec = {});
// Non-retarded chiral-electric energy near one plate:
// sigma / (16 pi^3) int chi_A alpha_B dxi * f, f = (r^2 [2 r_+^2 - 3 rho^2] - 3 r_+^2 rho^2) / (r^5 r_+^5).
EnergyResult potential_CE_nr_plate(const PolarizabilityModel& a, const PolarizabilityModel& b, const GeometryPair& g,
                                   const PlateSpec& plate, const PotentialSpec& spec = {});
double ce_plate_geometric_factor(const PlateFrameGeometry& f);
// Free space: (1 / 8 pi^3 r^6) int chi_A chi_B l(xi r) dxi, l(x) = e^{-2x}(3 + 6x + 4x^2).
EnergyResult potential_CC_free_iso(const PolarizabilityModel& a, const PolarizabilityModel& b, double r,
                                   const PotentialSpec& spec = {});
double cc_retardation_factor(double x);

// Frequency integrals of products of isotropic responses.
double integral_alpha_alpha(const PolarizabilityModel& a, const PolarizabilityModel& b, const PotentialSpec& spec = {});
double integral_chi_alpha(const PolarizabilityModel& a, const PolarizabilityModel& b, const PotentialSpec& spec = {});

}  // namespace chiralvdw
