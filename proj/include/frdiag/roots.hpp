#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "frdiag/errors.hpp"

namespace frdiag::roots {

/// Bisection for a sign change of f on [lo, hi]. Stops when the bracket is
/// below rel_tol relative width or when it cannot shrink any further.
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-15, int max_iter = 400) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw ConvergenceError("bisect: root not bracketed on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError("bisect: iteration cap reached");
}

/// Bisection in log-space for brackets spanning many decades (0 < lo < hi).
template <class F>
double bisect_log(F&& f, double lo, double hi, double rel_tol = 1e-15, int max_iter = 600) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw ConvergenceError("bisect_log: root not bracketed");
  }
  for (int it = 0; it < max_iter; ++it) {
    double mid = std::sqrt(lo) * std::sqrt(hi);
    if (hi / lo < 4.0) mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (hi - lo <= rel_tol * hi) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError("bisect_log: iteration cap reached");
}

/// Safeguarded Newton iteration on a bracket (rtsafe). `fdf(x)` returns
/// {f(x), f'(x)}. Newton steps leaving the bracket or converging too slowly
/// are replaced by bisection.
template <class FdF>
double newton_bisect(FdF&& fdf, double lo, double hi, double rel_tol = 1e-13,
                     int max_iter = 200, double abs_tol = 0.0) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw ConvergenceError("newton_bisect: root not bracketed");
  }
  // orient so that f(xl) < 0
  double xl = lo, xh = hi;
  if (flo > 0) std::swap(xl, xh);
  double x = 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [f, df] = fdf(x);
  for (int it = 0; it < max_iter; ++it) {
    const bool out = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
    const bool slow = std::abs(2.0 * f) > std::abs(dx_old * df);
    if (out || slow || df == 0.0) {
      dx_old = dx;
      dx = 0.5 * (xh - xl);
      x = xl + dx;
    } else {
      dx_old = dx;
      dx = f / df;
      x -= dx;
    }
    if (std::abs(dx) <= rel_tol * std::abs(x) || std::abs(dx) <= abs_tol ||
        std::abs(dx) < std::numeric_limits<double>::min()) {
      return x;
    }
    std::tie(f, df) = fdf(x);
    if (f == 0.0) return x;
    if (f < 0.0) {
      xl = x;
    } else {
      xh = x;
    }
  }
  throw ConvergenceError("newton_bisect: no convergence after " + std::to_string(max_iter) +
                         " iterations");
}

/// Multiplies `x` by `factor` until pred(x) holds. Returns the first such x.
template <class Pred>
double expand_until(Pred&& pred, double x, double factor, int max_steps = 2000) {
  for (int i = 0; i < max_steps; ++i) {
    if (pred(x)) return x;
    x *= factor;
  }
  throw ConvergenceError("expand_until: bracket search failed");
}

}  // namespace frdiag::roots
