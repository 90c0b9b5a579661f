#pragma once

#include <vector>

#include "chiralvdw/linalg.hpp"
#include "chiralvdw/quadrature.hpp"

namespace chiralvdw {

// Perfect chiral plate occupying the half-space behind the plane z = z0.
// normal = +1: molecules live at z > z0; normal = -1: molecules at z < z0.
// The -1 orientation is the +1 plate rotated by pi about the x axis, so its
// handedness is preserved.
struct PlateSpec {
  double z0 = 0.0;
  int chirality = +1;
  int normal = +1;

  // s -> p and p -> s conversion coefficients: (-1, +1) for chirality +1.
  double r_s_to_p() const { return chirality > 0 ? -1.0 : 1.0; }
  double r_p_to_s() const { return -r_s_to_p(); }
  // Height of a point above the plate, measured along the normal.
  double height(const Vector3& r) const { return normal > 0 ? r.z() - z0 : z0 - r.z(); }
  PlateSpec flipped() const { return {z0, -chirality, normal}; }
  void validate() const;
};

struct Environment {
  std::vector<PlateSpec> plates;

  static Environment free_space() { return {}; }
  static Environment single_plate(double z0, int chirality) { return {{PlateSpec{z0, chirality, +1}}}; }
  // Lower plate at z_low facing up, upper plate at z_high facing down; identical
  // material for equal chirality.
  static Environment cavity(double z_low, double z_high, int chirality);

  Environment with_chirality_flipped() const;
  void validate() const;
  // Throws SingularityError when `r` is on or behind a plate.
  void check_position(const Vector3& r) const;
};

struct GeometryPair {
  Vector3 r_a = Vector3::Zero();
  Vector3 r_b = Vector3::Zero();

  Vector3 separation() const { return r_b - r_a; }
  double distance() const { return separation().norm(); }
  Vector3 unit() const { return separation() / distance(); }
  GeometryPair swapped() const { return {r_b, r_a}; }
};

// Pair geometry seen in a plate's own frame (plate at z = 0, molecules above).
struct PlateFrameGeometry {
  double x = 0.0;   // x_B - x_A
  double y = 0.0;   // y_B - y_A
  double z_a = 0.0;
  double z_b = 0.0;
  double z_plus() const { return z_a + z_b; }
  double r_plus() const;
};

PlateFrameGeometry plate_frame(const GeometryPair& g, const PlateSpec& plate);
// Maps a plate-frame tensor back to the lab frame.
Tensor3 from_plate_frame(const Tensor3& t, const PlateSpec& plate);

// G(r_A, r_B), left curl nabla_A x G, right curl G x nabla_B and the double curl
// nabla_A x G x nabla_B, all at imaginary frequency.
struct GreensBundle {
  Tensor3 g = Tensor3::Zero();
  Tensor3 curl_left = Tensor3::Zero();
  Tensor3 curl_right = Tensor3::Zero();
  Tensor3 curl_both = Tensor3::Zero();

  GreensBundle& operator+=(const GreensBundle& o);
};

struct GreensResult {
  GreensBundle bundle;
  double error = 0.0;  // quadrature error estimate (relative, worst plate)
};

// Free-space (bulk) tensors; exact closed forms.
Tensor3 free_space_G(const GeometryPair& g, double xi);
Tensor3 curl_free_space_G(const GeometryPair& g, double xi);
GreensBundle free_space_bundle(const GeometryPair& g, double xi);

// Angular-spectrum quadrature of the single-reflection plate tensor. The phi
// integral is done exactly through Bessel functions J_0..J_4 of k*rho; the k
// integral uses composite Gauss-Legendre panels on [0, k_max], graded from xi
// and no wider than 4 / z_+ or one Bessel period, with k_max = ~40 / z_+.
GreensResult plate_bundle(const GeometryPair& g, const PlateSpec& plate, double xi, const QuadratureSpec& spec);
Tensor3 plate_scattering_G(const GeometryPair& g, const PlateSpec& plate, double xi, const QuadratureSpec& spec);
Tensor3 curl_plate_G(const GeometryPair& g, const PlateSpec& plate, double xi, const QuadratureSpec& spec);

// Non-retarded closed forms (xi r_+ / c -> 0).
Tensor3 plate_scattering_G_nr(const GeometryPair& g, const PlateSpec& plate, double xi);
Tensor3 curl_plate_G_nr(const GeometryPair& g, const PlateSpec& plate, double xi);

// Bulk plus one reflection per plate (no multiple reflections in a cavity).
GreensResult total_bundle(const GeometryPair& g, const Environment& env, double xi, const QuadratureSpec& spec);
Tensor3 total_G(const GeometryPair& g, const Environment& env, double xi, const QuadratureSpec& spec);
Tensor3 total_curl_G(const GeometryPair& g, const Environment& env, double xi, const QuadratureSpec& spec);

// Default spec for the plate k integral.
QuadratureSpec default_plate_spec();

}  // namespace chiralvdw
