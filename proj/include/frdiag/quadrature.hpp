#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace frdiag::quad {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// The 64-point rule used by every panel in the library (computed once).
const GaussRule& gl64();

/// Composite 64-point Gauss-Legendre on `panels` equal panels of [a, b].
template <class F>
double integrate_panels(F&& f, double a, double b, int panels) {
  const GaussRule& rule = gl64();
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double half = 0.5 * h;
    const double mid = lo + half;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    total += half * acc;
  }
  return total;
}

/// Panels doubled until successive estimates agree to rel_tol.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, int max_doublings = 10) {
  int panels = 1;
  double prev = integrate_panels(f, a, b, panels);
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    const double cur = integrate_panels(f, a, b, panels);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) || std::abs(cur - prev) < 1e-300) return cur;
    prev = cur;
  }
  return prev;
}

/// True when each of the last three refinements grows the estimate by at
/// least `factor`. Estimates are compared by absolute value.
bool diverging(std::span<const double> estimates, double factor = 1.01);

/// True when the last three entries shrink geometrically by `factor`, i.e.
/// the sequence tends to zero.
bool vanishing(std::span<const double> values, double factor = 1.01);

}  // namespace frdiag::quad
