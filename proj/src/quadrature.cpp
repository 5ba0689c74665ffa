#include "frdiag/quadrature.hpp"

#include <numbers>

namespace frdiag::quad {

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussRule& gl64() {
  static const GaussRule rule = gauss_legendre(64);
  return rule;
}

bool diverging(std::span<const double> estimates, double factor) {
  const std::size_t n = estimates.size();
  if (n < 4) return false;
  for (std::size_t i = n - 3; i < n; ++i) {
    const double prev = std::abs(estimates[i - 1]);
    const double cur = std::abs(estimates[i]);
    if (!(cur >= factor * prev) || prev == 0.0) return false;
  }
  return true;
}

bool vanishing(std::span<const double> values, double factor) {
  const std::size_t n = values.size();
  if (n < 4) return false;
  for (std::size_t i = n - 3; i < n; ++i) {
    const double prev = std::abs(values[i - 1]);
    const double cur = std::abs(values[i]);
    if (!(cur * factor <= prev)) return false;
  }
  return true;
}

}  // namespace frdiag::quad
