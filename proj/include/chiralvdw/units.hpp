#pragma once

#include <cmath>

namespace chiralvdw {

// CODATA 2018 values in SI.
namespace si {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double c = 299792458.0;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double bohr_radius = 5.29177210903e-11;
inline constexpr double bohr_magneton = 9.2740100783e-24;
inline constexpr double hartree = 4.3597447222071e-18;
inline constexpr double fine_structure = 7.2973525693e-3;
inline constexpr double atomic_frequency = hartree / hbar;  // rad/s
}  // namespace si

// Internal units: hbar = c = eps0 = 1, frequencies in omega_ref, lengths in
// c/omega_ref, energies in hbar*omega_ref. Dipoles d satisfy d^2 / (eps0 L^3)
// = energy; magnetic moments enter as m/c with the same scale as d.
struct UnitScale {
  double omega_ref = si::atomic_frequency;  // rad/s

  double length() const { return si::c / omega_ref; }
  double energy() const { return si::hbar * omega_ref; }
  double force() const { return energy() / length(); }
  double electric_dipole() const { return std::sqrt(si::epsilon0 * si::hbar * si::c * si::c * si::c) / omega_ref; }
  double magnetic_dipole() const { return si::c * electric_dipole(); }
};

}  // namespace chiralvdw
