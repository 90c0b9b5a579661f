#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "chiralvdw/errors.hpp"
#include "chiralvdw/linalg.hpp"

namespace chiralvdw {

// Node counts, mapping scale and tolerances for one integration axis.
struct QuadratureSpec {
  int nodes = 32;                     // initial Gauss-Legendre nodes (>= 2)
  double scale = 1.0;                 // s in x = s t / (1 - t)
  double relative_tolerance = 1e-10;  // > 0
  double absolute_tolerance = 0.0;    // >= 0, added to the relative bound
  int max_refinements = 6;            // node doublings after the first comparison

  void validate() const;
  QuadratureSpec with_scale(double s) const {
    QuadratureSpec copy = *this;
    copy.scale = s;
    return copy;
  }
};

template <class V>
struct QuadratureResult {
  V value;
  double error = 0.0;  // |I(2n) - I(n)| in the value's magnitude norm
  int nodes = 0;       // node count of the accepted estimate
  long evaluations = 0;
};

// Refinement budget exhausted. Carries the last estimate (as magnitude) and error.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double last_estimate, double last_error)
      : NumericalError(what), last_estimate_(last_estimate), last_error_(last_error) {}
  double last_estimate() const { return last_estimate_; }
  double last_error() const { return last_error_; }

 private:
  double last_estimate_;
  double last_error_;
};

// The integrand returned NaN or infinity.
class NonFiniteError : public NumericalError {
 public:
  NonFiniteError(const std::string& what, double node) : NumericalError(what), node_(node) {}
  double node() const { return node_; }

 private:
  double node_;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Cached n-point rule; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(int n);

// Norm and finiteness hooks used by the integrators. Overload for custom value
// types (found by ADL).
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }
template <class D>
double magnitude(const Eigen::MatrixBase<D>& m) {
  return m.norm();
}
inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
template <class D>
bool all_finite(const Eigen::MatrixBase<D>& m) {
  return m.allFinite();
}

namespace detail {

template <class V>
V pairwise_sum(const std::vector<V>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  V left = pairwise_sum(terms, lo, mid);
  left += pairwise_sum(terms, mid, hi);
  return left;
}

// One Gauss-Legendre pass over [-1, 1]; `map` turns (u, w) into (x, weight).
template <class F, class Map>
auto gauss_pass(F& f, const Map& map, int n, const char* who) {
  using V = std::decay_t<decltype(f(0.0))>;
  const GaussLegendreRule& rule = gauss_legendre(n);
  std::vector<V> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto [x, w] = map(rule.nodes[i], rule.weights[i]);
    V fx = f(x);
    if (!all_finite(fx)) {
      throw NonFiniteError(std::string(who) + ": integrand is not finite at x = " + std::to_string(x), x);
    }
    terms.push_back(V(fx * w));
  }
  return pairwise_sum(terms, 0, terms.size());
}

// Doubles n in `pass(n)` until two successive passes agree.
template <class Pass>
auto refine_passes(Pass&& pass, const QuadratureSpec& spec, long evals_per_node, const char* who) {
  spec.validate();
  using V = std::decay_t<decltype(pass(1))>;
  int n = spec.nodes;
  long evaluations = n * evals_per_node;
  V coarse = pass(n);
  double err = 0.0;
  for (int level = 0; level <= spec.max_refinements; ++level) {
    n *= 2;
    V fine = pass(n);
    evaluations += n * evals_per_node;
    err = magnitude(V(fine - coarse));
    const double bound = spec.relative_tolerance * magnitude(fine) + spec.absolute_tolerance;
    if (err <= bound) return QuadratureResult<V>{std::move(fine), err, n, evaluations};
    coarse = std::move(fine);
  }
  throw QuadratureError(std::string(who) + ": no convergence after " + std::to_string(spec.max_refinements) +
                            " refinements (estimate " + std::to_string(magnitude(coarse)) + ", error " +
                            std::to_string(err) + ")",
                        magnitude(coarse), err);
}

template <class F, class Map>
auto refine(F& f, const Map& map, const QuadratureSpec& spec, const char* who) {
  return refine_passes([&](int n) { return gauss_pass(f, map, n, who); }, spec, 1, who);
}

}  // namespace detail

// Integral over [0, inf) through x = s t / (1 - t), Gauss-Legendre in t, node
// count doubled until |I(2n) - I(n)| <= rel * |I(2n)| + abs.
template <class F>
auto integrate_semi_infinite(F&& f, const QuadratureSpec& spec) {
  const double s = spec.scale;
  auto map = [s](double u, double w) {
    const double t = 0.5 * (u + 1.0);
    const double one_minus = 1.0 - t;
    return std::pair<double, double>{s * t / one_minus, 0.5 * w * s / (one_minus * one_minus)};
  };
  return detail::refine(f, map, spec, "integrate_semi_infinite");
}

// Same, over [a, inf).
template <class F>
auto integrate_from(F&& f, double a, const QuadratureSpec& spec) {
  auto shifted = [&f, a](double x) { return f(a + x); };
  return integrate_semi_infinite(shifted, spec);
}

// Integral over the finite interval [a, b] with the same doubling strategy.
template <class F>
auto integrate_interval(F&& f, double a, double b, const QuadratureSpec& spec) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  auto map = [half, mid](double u, double w) { return std::pair<double, double>{mid + half * u, half * w}; };
  return detail::refine(f, map, spec, "integrate_interval");
}

// Composite rule: n-point Gauss-Legendre on every panel [b_i, b_{i+1}], with
// n doubled globally until successive passes agree.
template <class F>
auto integrate_panels(F&& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
  if (breaks.size() < 2) throw std::invalid_argument("integrate_panels: need at least one panel");
  auto pass = [&](int n) {
    using V = std::decay_t<decltype(f(0.0))>;
    std::vector<V> parts;
    parts.reserve(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double half = 0.5 * (breaks[i + 1] - breaks[i]);
      const double mid = 0.5 * (breaks[i + 1] + breaks[i]);
      auto map = [half, mid](double u, double w) { return std::pair<double, double>{mid + half * u, half * w}; };
      parts.push_back(detail::gauss_pass(f, map, n, "integrate_panels"));
    }
    return detail::pairwise_sum(parts, 0, parts.size());
  };
  return detail::refine_passes(pass, spec, static_cast<long>(breaks.size() - 1), "integrate_panels");
}

// Trapezoid rule on n uniform nodes of [0, 2pi); spectrally accurate for smooth
// periodic integrands.
template <class F>
auto integrate_periodic(F&& f, int n) {
  if (n < 4) throw std::invalid_argument("integrate_periodic: need at least 4 nodes, got " + std::to_string(n));
  using V = std::decay_t<decltype(f(0.0))>;
  const double h = 2.0 * kPi / n;
  std::vector<V> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    V fx = f(h * i);
    if (!all_finite(fx)) {
      throw NonFiniteError("integrate_periodic: integrand is not finite at phi = " + std::to_string(h * i), h * i);
    }
    terms.push_back(V(fx * h));
  }
  return detail::pairwise_sum(terms, 0, terms.size());
}

}  // namespace chiralvdw
