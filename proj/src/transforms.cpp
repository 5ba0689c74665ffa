#include "frdiag/transforms.hpp"

#include <cmath>

#include "frdiag/errors.hpp"
#include "frdiag/quadrature.hpp"
#include "frdiag/roots.hpp"

namespace frdiag {

namespace {

void require_upper(cplx z, const char* where) {
  if (!(z.imag() > 0.0)) throw DomainError(std::string(where) + ": Im z must be positive");
}

cplx sym_G(const SymmetricMeasure& mu, cplx z) {
  // z/(z^2 - x^2) = (1/(z-x) + 1/(z+x))/2, and int dmu(x)/(z+x) = -conj(C(-conj z))
  const PositiveMeasure& m = mu.modulus();
  return 0.5 * (m.cauchy_transform(z) - std::conj(m.cauchy_transform(-std::conj(z))));
}

}  // namespace

GF transform_GF(const SymmetricMeasure& mu, cplx z) {
  require_upper(z, "transform_GF");
  const cplx G = sym_G(mu, z);
  return {G, 1.0 / G};
}

GF transform_GF(const RealMeasure& mu, cplx z) {
  require_upper(z, "transform_GF");
  const cplx G = mu.integrate([&](double x) { return 1.0 / (z - x); });
  return {G, 1.0 / G};
}

double g_imag_modulus(const PositiveMeasure& mu_sq, double y) {
  if (!(y > 0.0)) throw DomainError("g_imag_modulus: y must be positive");
  const double y2 = y * y;
  return y * mu_sq.integrate([&](double t) { return 1.0 / (y2 + t); });
}

double g_imag(const SymmetricMeasure& mu, double y) {
  if (!(y > 0.0)) throw DomainError("g_imag: y must be positive");
  const double y2 = y * y;
  return y * mu.modulus().integrate([&](double x) { return 1.0 / (y2 + x * x); });
}

double g_imag_derivative(const SymmetricMeasure& mu, double y) {
  const double y2 = y * y;
  return mu.modulus().integrate([&](double x) {
    const double d = y2 + x * x;
    return (x * x - y2) / (d * d);
  });
}

Law Law::of(const SymmetricMeasure& mu) {
  Law law;
  law.G_ = [mu](cplx z) { return sym_G(mu, z); };
  law.g_ = [mu](double y) { return frdiag::g_imag(mu, y); };
  law.dg_ = [mu](double y) { return frdiag::g_imag_derivative(mu, y); };
  if (mu.is_point_mass()) law.point_ = 0.0;
  return law;
}

Law Law::of(const RealMeasure& mu) {
  Law law;
  law.G_ = [mu](cplx z) { return mu.integrate([&](double x) { return 1.0 / (z - x); }); };
  law.point_ = mu.point_location();
  return law;
}

Law Law::semicircle(double variance) {
  if (!(variance > 0.0)) throw DomainError("semicircle: variance must be positive");
  Law law;
  const double t = variance;
  const double edge = 2.0 * std::sqrt(t);
  law.G_ = [t, edge](cplx z) { return (z - std::sqrt(z - edge) * std::sqrt(z + edge)) / (2.0 * t); };
  law.g_ = [t](double y) { return 2.0 / (y + std::sqrt(y * y + 4.0 * t)); };
  law.dg_ = [t](double y) {
    const double r = std::sqrt(y * y + 4.0 * t);
    return (y / r - 1.0) / (2.0 * t);
  };
  return law;
}

Law Law::cauchy(double scale) {
  if (!(scale > 0.0)) throw DomainError("cauchy: scale must be positive");
  Law law;
  const double s = scale;
  law.G_ = [s](cplx z) { return 1.0 / (z + cplx(0.0, s)); };
  law.g_ = [s](double y) { return 1.0 / (y + s); };
  law.dg_ = [s](double y) { return -1.0 / ((y + s) * (y + s)); };
  return law;
}

Law Law::point(double c) {
  Law law;
  law.G_ = [c](cplx z) { return 1.0 / (z - c); };
  if (c == 0.0) {
    law.g_ = [](double y) { return 1.0 / y; };
    law.dg_ = [](double y) { return -1.0 / (y * y); };
  }
  law.point_ = c;
  return law;
}

cplx Law::G(cplx z) const {
  require_upper(z, "Law::G");
  return G_(z);
}

double Law::g_imag(double y) const {
  if (!g_) throw Unsupported("Law::g_imag: law is not symmetric");
  if (!(y > 0.0)) throw DomainError("Law::g_imag: y must be positive");
  return g_(y);
}

double Law::g_imag_derivative(double y) const {
  if (!dg_) throw Unsupported("Law::g_imag_derivative: law is not symmetric");
  return dg_(y);
}

double psi_transform(const PositiveMeasure& mu, double z) {
  if (!(z < 0.0)) throw DomainError("psi_transform: z must be negative");
  return mu.integrate([z](double x) { return z * x / (1.0 - z * x); });
}

STau s_transform_at_tau(const PositiveMeasure& mu, double tau) {
  const double one_plus_u = mu.integrate([tau](double x) { return 1.0 / (1.0 + tau * x); });
  const double first = mu.integrate([tau](double x) { return x / (1.0 + tau * x); });
  return {-tau * first, one_plus_u / first};
}

double s_transform(const PositiveMeasure& mu, double u) {
  const double a0 = mu.atom_at_zero();
  if (mu.is_point_mass() && a0 > 0.5) throw DegenerateMeasure("s_transform: measure is delta_0");
  if (!(u > a0 - 1.0 && u < 0.0)) throw DomainError("s_transform: u outside (mu(0) - 1, 0)");
  const double target = -u;
  // a(s) = int tau x / (1 + tau x) dmu with tau = e^s, increasing in s
  auto fdf = [&](double s) {
    const double tau = std::exp(s);
    double a = 0.0, da = 0.0;
    a = mu.integrate([tau](double x) { return tau * x / (1.0 + tau * x); });
    da = mu.integrate([tau](double x) {
      const double d = 1.0 + tau * x;
      return tau * x / (d * d);
    });
    return std::pair{a - target, da};
  };
  double lo = 0.0, hi = 0.0;
  while (fdf(lo).first > 0.0) {
    lo -= 2.0;
    if (lo < -700.0) throw ConvergenceError("s_transform: lower bracket not found");
  }
  while (fdf(hi).first < 0.0) {
    hi += 2.0;
    if (hi > 700.0) throw ConvergenceError("s_transform: upper bracket not found");
  }
  const double s = roots::newton_bisect(fdf, lo, hi, 1e-15, 200);
  return s_transform_at_tau(mu, std::exp(s)).S;
}

namespace {

ExtendedReal limit_from_samples(const std::vector<double>& vals) {
  for (double v : vals) {
    if (!std::isfinite(v)) return ExtendedReal::infinity();
  }
  if (quad::diverging(vals)) return ExtendedReal::infinity();
  const std::size_t n = vals.size();
  // samples at h and h/2 with error linear in h
  return ExtendedReal::finite(2.0 * vals[n - 1] - vals[n - 2]);
}

}  // namespace

ExtendedReal s_limit_at_minus_one(const PositiveMeasure& mu) {
  if (mu.atom_at_zero() > 0.0) throw DomainError("s_limit_at_minus_one: mu has an atom at 0");
  return s_limit_at_minus_one([&mu](double u) { return s_transform(mu, u); });
}

ExtendedReal s_limit_at_minus_one(const std::function<double(double)>& S) {
  std::vector<double> vals;
  for (int j = 4; j <= 20; ++j) vals.push_back(S(-1.0 + std::ldexp(1.0, -j)));
  return limit_from_samples(vals);
}

double phi_imag_axis(const Law& law, double v) {
  if (!(v > 0.0)) throw DomainError("phi_imag_axis: v must be positive");
  auto f = [&](double y) { return 1.0 / law.g_imag(y); };
  auto fdf = [&](double y) {
    const double g = law.g_imag(y);
    return std::pair{1.0 / g - v, -law.g_imag_derivative(y) / (g * g)};
  };
  double prev = v;
  double fprev = f(prev);
  if (fprev <= v) return 0.0;
  double prev2 = prev;
  for (int it = 0; it < 2000; ++it) {
    const double y = 0.5 * prev;
    if (y < 1e-300) break;
    const double fy = f(y);
    if (fy < v) return roots::newton_bisect(fdf, y, prev, 1e-15, 200) - v;
    if (fy >= fprev) {
      // f turned around: its minimum lies in [y, prev2]. Without a sign change
      // of f' this is rounding on a flat tail, so v is below the range.
      const double dlo = law.g_imag_derivative(y), dhi = law.g_imag_derivative(prev2);
      if (!(dlo * dhi < 0.0)) break;
      const double ymin = roots::bisect([&](double x) { return law.g_imag_derivative(x); }, y, prev2);
      const double fmin = f(ymin);
      if (std::abs(fmin - v) <= 1e-12 * v) return ymin - v;
      if (fmin < v) return roots::newton_bisect(fdf, ymin, prev, 1e-15, 200) - v;
      throw DomainError("phi_imag_axis: v = " + std::to_string(v) + " is below the range of F on iR+");
    }
    prev2 = prev;
    prev = y;
    fprev = fy;
  }
  throw DomainError("phi_imag_axis: v is below the range of F on iR+");
}

double phi_imag_axis(const SymmetricMeasure& mu, double v) { return phi_imag_axis(Law::of(mu), v); }

double r_imag(const Law& law, double y) {
  if (!(y > 0.0)) throw DomainError("r_imag: y must be positive");
  return -phi_imag_axis(law, 1.0 / y);
}

cplx phi_from_pair(const GeneratingPair& pair, cplx z) {
  require_upper(z, "phi_from_pair");
  if (pair.sigma_mass == 0.0) return pair.gamma;
  const cplx z2 = z * z;
  // the two mirror points s, -s combine to z (1 + s^2) / (z^2 - s^2)
  const cplx body = pair.shape.modulus().integrate([&](double s) { return z * (1.0 + s * s) / (z2 - s * s); });
  return pair.gamma + pair.sigma_mass * body;
}

double phi_imag_from_pair(const GeneratingPair& pair, double v) {
  if (!(v > 0.0)) throw DomainError("phi_imag_from_pair: v must be positive");
  if (pair.sigma_mass == 0.0) return 0.0;
  const double v2 = v * v;
  const double body = pair.shape.modulus().integrate([&](double s) { return (1.0 + s * s) / (v2 + s * s); });
  return -v * pair.sigma_mass * body;
}

}  // namespace frdiag
