#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "chiralvdw/errors.hpp"
#include "chiralvdw/linalg.hpp"

namespace chiralvdw {

inline std::string format_point(const Vector3& p) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  return os.str();
}

// Second-order central-difference gradient of a scalar field.
template <class F>
Vector3 gradient_central(F&& f, const Vector3& at, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gradient_central: step must be positive");
  Vector3 grad;
  for (int axis = 0; axis < 3; ++axis) {
    Vector3 plus = at;
    Vector3 minus = at;
    plus(axis) += h;
    minus(axis) -= h;
    const double fp = f(plus);
    if (!std::isfinite(fp)) throw NumericalError("gradient_central: non-finite value at " + format_point(plus));
    const double fm = f(minus);
    if (!std::isfinite(fm)) throw NumericalError("gradient_central: non-finite value at " + format_point(minus));
    grad(axis) = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace chiralvdw
