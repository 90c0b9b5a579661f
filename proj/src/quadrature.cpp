#include "chiralvdw/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace chiralvdw {

void QuadratureSpec::validate() const {
  if (nodes < 2) throw std::invalid_argument("QuadratureSpec: nodes must be >= 2");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("QuadratureSpec: scale must be positive");
  if (!(relative_tolerance > 0.0)) throw std::invalid_argument("QuadratureSpec: relative_tolerance must be positive");
  if (absolute_tolerance < 0.0) throw std::invalid_argument("QuadratureSpec: absolute_tolerance must be >= 0");
  if (max_refinements < 0) throw std::invalid_argument("QuadratureSpec: max_refinements must be >= 0");
}

namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<const GaussLegendreRule>(build_rule(n))).first;
  }
  return *it->second;
}

}  // namespace chiralvdw
