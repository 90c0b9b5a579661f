#pragma once

#include <string>
#include <vector>

#include "chiralvdw/linalg.hpp"

namespace chiralvdw {

// One ground-state dipole transition 0 -> k, in internal units.
// Time-reversal symmetry makes d real and m purely imaginary, so the magnetic
// matrix element is stored as m_{0k} = i * m_imag and m_{k0} = -i * m_imag.
// m_imag already carries the 1/c of mu^1 = m/c.
struct Transition {
  double omega = 1.0;
  Vector3 d = Vector3::Zero();
  Vector3 m_imag = Vector3::Zero();

  void validate() const;

  CVector3 d_0k() const { return d.cast<Complex>(); }
  CVector3 d_k0() const { return d.cast<Complex>(); }
  CVector3 m_0k() const { return Complex(0.0, 1.0) * m_imag.cast<Complex>(); }
  CVector3 m_k0() const { return Complex(0.0, -1.0) * m_imag.cast<Complex>(); }
};

// R_k = Im(d_{0k} . m_{k0}).
double rotatory_strength(const Transition& t);

class PolarizabilityModel {
 public:
  PolarizabilityModel() = default;
  PolarizabilityModel(std::string name, std::vector<Transition> transitions, int handedness = +1,
                      bool isotropic = true);

  const std::string& name() const { return name_; }
  int handedness() const { return handedness_; }
  bool isotropic() const { return isotropic_; }
  const std::vector<Transition>& raw_transitions() const { return transitions_; }

  // Transitions with the handedness applied (m negated for handedness -1).
  std::vector<Transition> transitions() const;

  bool chiral() const;
  double dominant_frequency() const;

  PolarizabilityModel enantiomer() const;
  PolarizabilityModel with_handedness(int handedness) const;
  // Multiplies every magnetic moment by `factor`.
  PolarizabilityModel with_magnetic_scale(double factor) const;
  PolarizabilityModel with_isotropic(bool isotropic) const;

 private:
  std::string name_;
  std::vector<Transition> transitions_;
  int handedness_ = +1;
  bool isotropic_ = true;
};

// Orientation-averaged responses on the imaginary axis, omega = i xi.
// alpha = (2/3) sum |d|^2 w / (w^2 + xi^2)
double alpha_iso(const PolarizabilityModel& model, double xi);
// beta = alpha^{11} = (2/3) sum |m|^2 w / (w^2 + xi^2)
double beta_iso(const PolarizabilityModel& model, double xi);
// chi = (1/3) Tr chi^{em} = -(2/3) sum R_k xi / (w^2 + xi^2)
double chi_iso(const PolarizabilityModel& model, double xi);

// alpha^{lambda lambda'}(i xi) summed directly from the complex matrix elements,
// mu^0 = d, mu^1 = m/c. Full tensor, ignores the model's isotropic flag.
Tensor3 general_polarizability(const PolarizabilityModel& model, int lambda, int lambda_prime, double xi);

// (1/3) Tr(T) * I.
Tensor3 isotropic_average(const Tensor3& t);

// The tensor the potentials use: general_polarizability, isotropically
// averaged when the model is flagged isotropic.
Tensor3 response_tensor(const PolarizabilityModel& model, int lambda, int lambda_prime, double xi);

}  // namespace chiralvdw
