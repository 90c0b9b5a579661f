#include "chiralvdw/polarizability.hpp"

#include <cmath>
#include <stdexcept>

#include "chiralvdw/errors.hpp"

namespace chiralvdw {

void Transition::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("transition frequency must be positive");
  if (!d.allFinite() || !m_imag.allFinite()) throw ConfigError("transition dipole moments must be finite");
}

double rotatory_strength(const Transition& t) {
  return (t.d_0k().transpose() * t.m_k0())(0).imag();
}

PolarizabilityModel::PolarizabilityModel(std::string name, std::vector<Transition> transitions, int handedness,
                                         bool isotropic)
    : name_(std::move(name)), transitions_(std::move(transitions)), handedness_(handedness), isotropic_(isotropic) {
  if (handedness_ != 1 && handedness_ != -1) throw ConfigError("handedness must be +1 or -1");
  for (const auto& t : transitions_) t.validate();
}

std::vector<Transition> PolarizabilityModel::transitions() const {
  std::vector<Transition> out = transitions_;
  if (handedness_ < 0) {
    for (auto& t : out) t.m_imag = -t.m_imag;
  }
  return out;
}

bool PolarizabilityModel::chiral() const {
  for (const auto& t : transitions_) {
    if (t.d.dot(t.m_imag) != 0.0) return true;
  }
  return false;
}

double PolarizabilityModel::dominant_frequency() const {
  double best = 1.0;
  double weight = -1.0;
  for (const auto& t : transitions_) {
    const double w = t.d.squaredNorm() + t.m_imag.squaredNorm();
    if (w > weight) {
      weight = w;
      best = t.omega;
    }
  }
  return best;
}

PolarizabilityModel PolarizabilityModel::enantiomer() const { return with_handedness(-handedness_); }

PolarizabilityModel PolarizabilityModel::with_handedness(int handedness) const {
  return PolarizabilityModel(name_, transitions_, handedness, isotropic_);
}

PolarizabilityModel PolarizabilityModel::with_magnetic_scale(double factor) const {
  std::vector<Transition> scaled = transitions_;
  for (auto& t : scaled) t.m_imag *= factor;
  return PolarizabilityModel(name_, std::move(scaled), handedness_, isotropic_);
}

PolarizabilityModel PolarizabilityModel::with_isotropic(bool isotropic) const {
  return PolarizabilityModel(name_, transitions_, handedness_, isotropic);
}

namespace {

void require_imaginary_axis(double xi) {
  if (!(xi >= 0.0)) throw std::invalid_argument("polarizability: xi must be >= 0");
}

}  // namespace

double alpha_iso(const PolarizabilityModel& model, double xi) {
  require_imaginary_axis(xi);
  double sum = 0.0;
  for (const auto& t : model.transitions()) {
    sum += t.d.squaredNorm() * t.omega / (t.omega * t.omega + xi * xi);
  }
  return 2.0 / 3.0 * sum;
}

double beta_iso(const PolarizabilityModel& model, double xi) {
  require_imaginary_axis(xi);
  double sum = 0.0;
  for (const auto& t : model.transitions()) {
    sum += t.m_imag.squaredNorm() * t.omega / (t.omega * t.omega + xi * xi);
  }
  return 2.0 / 3.0 * sum;
}

double chi_iso(const PolarizabilityModel& model, double xi) {
  require_imaginary_axis(xi);
  double sum = 0.0;
  for (const auto& t : model.transitions()) {
    sum += rotatory_strength(t) * xi / (t.omega * t.omega + xi * xi);
  }
  return -2.0 / 3.0 * sum;
}

Tensor3 general_polarizability(const PolarizabilityModel& model, int lambda, int lambda_prime, double xi) {
  require_imaginary_axis(xi);
  if ((lambda != 0 && lambda != 1) || (lambda_prime != 0 && lambda_prime != 1)) {
    throw std::invalid_argument("general_polarizability: indices must be 0 or 1");
  }
  CTensor3 sum = CTensor3::Zero();
  const Complex freq(0.0, xi);
  for (const auto& t : model.transitions()) {
    const CVector3 mu_k0 = lambda == 0 ? t.d_k0() : t.m_k0();
    const CVector3 mu_0k = lambda == 0 ? t.d_0k() : t.m_0k();
    const CVector3 nu_0k = lambda_prime == 0 ? t.d_0k() : t.m_0k();
    const CVector3 nu_k0 = lambda_prime == 0 ? t.d_k0() : t.m_k0();
    sum += dyadic(mu_k0, nu_0k) / (t.omega + freq) + dyadic(mu_0k, nu_k0) / (t.omega - freq);
  }
  const double scale = sum.cwiseAbs().maxCoeff();
  if (max_abs_imag(sum) > 1e-12 * scale) {
    throw NumericalError("general_polarizability: imaginary residue on the imaginary frequency axis");
  }
  return sum.real();
}

Tensor3 isotropic_average(const Tensor3& t) { return t.trace() / 3.0 * Tensor3::Identity(); }

Tensor3 response_tensor(const PolarizabilityModel& model, int lambda, int lambda_prime, double xi) {
  Tensor3 full = general_polarizability(model, lambda, lambda_prime, xi);
  return model.isotropic() ? isotropic_average(full) : full;
}

}  // namespace chiralvdw
