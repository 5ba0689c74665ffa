#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "frdiag/measure.hpp"

namespace frdiag {

using cplx = std::complex<double>;

struct GF {
  cplx G;
  cplx F;
};

GF transform_GF(const SymmetricMeasure& mu, cplx z);
GF transform_GF(const RealMeasure& mu, cplx z);

/// -Im G(iy) of the symmetrized law of |A|, from the law of |A|^2:
/// y * int dmu(t) / (y^2 + t).
double g_imag_modulus(const PositiveMeasure& mu_sq, double y);

/// -Im G(iy) of a symmetric law and its y-derivative.
double g_imag(const SymmetricMeasure& mu, double y);
double g_imag_derivative(const SymmetricMeasure& mu, double y);

/// A law on R seen through its Cauchy transform. Either backed by a measure
/// (quadrature sums) or by a closed form.
class Law {
 public:
  static Law of(const SymmetricMeasure& mu);
  static Law of(const RealMeasure& mu);
  static Law semicircle(double variance);
  static Law cauchy(double scale);
  static Law point(double c);

  cplx G(cplx z) const;
  cplx F(cplx z) const { return 1.0 / G(z); }

  std::optional<double> point_location() const { return point_; }
  bool is_point_mass() const { return point_.has_value(); }
  bool is_symmetric() const { return static_cast<bool>(g_); }

  /// -Im G(iy) and d/dy of it; symmetric laws only.
  double g_imag(double y) const;
  double g_imag_derivative(double y) const;

 private:
  std::function<cplx(cplx)> G_;
  std::function<double(double)> g_;
  std::function<double(double)> dg_;
  std::optional<double> point_;
};

/// psi(z) = int z x / (1 - z x) dmu for real z < 0.
double psi_transform(const PositiveMeasure& mu, double z);

/// S_mu(u) for mu(0) - 1 < u < 0.
double s_transform(const PositiveMeasure& mu, double u);

/// Parametrisation of S by the positive variable tau = -chi(u):
/// 1 + u = int dmu / (1 + tau x). Returns {u, S(u)}.
struct STau {
  double u;
  double S;
};
STau s_transform_at_tau(const PositiveMeasure& mu, double tau);

/// lim_{u -> -1} S(u), from u = -1 + 2^-j, j = 4..20, with divergence detection.
ExtendedReal s_limit_at_minus_one(const PositiveMeasure& mu);
ExtendedReal s_limit_at_minus_one(const std::function<double(double)>& S);

/// phi(iv) = i * phi_hat(v) for a symmetric law. Inverts f(y) = 1/G(y) on
/// the branch that contains large y.
double phi_imag_axis(const Law& law, double v);
double phi_imag_axis(const SymmetricMeasure& mu, double v);

/// Imaginary part of R(iy) = -phi_hat(1/y).
double r_imag(const Law& law, double y);

/// Free generating pair (gamma, sigma). sigma = sigma_mass * shape, shape a
/// symmetric probability measure (ignored when sigma_mass is 0).
struct GeneratingPair {
  double gamma = 0.0;
  double sigma_mass = 0.0;
  SymmetricMeasure shape;
};

/// gamma + int (1 + s z) / (z - s) dsigma(s).
cplx phi_from_pair(const GeneratingPair& pair, cplx z);

/// phi_hat(v) from the pair: -v int (1 + s^2) / (v^2 + s^2) dsigma(s).
double phi_imag_from_pair(const GeneratingPair& pair, double v);

}  // namespace frdiag
