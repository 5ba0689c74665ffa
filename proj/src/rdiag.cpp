#include "frdiag/rdiag.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "frdiag/errors.hpp"
#include "frdiag/freeconv.hpp"
#include "frdiag/io.hpp"
#include "frdiag/quadrature.hpp"
#include "frdiag/roots.hpp"

namespace frdiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLabelTol = 1e-12;

// sup{S near 0^-} as 1/m_2; 0 when S vanishes at 0
double s_at_zero(const std::function<double(double)>& S) {
  std::vector<double> vals;
  for (int j = 10; j <= 60; j += 2) {
    const double v = S(-std::ldexp(1.0, -j));
    if (v == 0.0) return 0.0;
    vals.push_back(v);
  }
  if (quad::vanishing(vals)) return 0.0;
  return vals.back();
}

}  // namespace

std::string to_csv(const RadialCDF& cdf) {
  std::ostringstream os;
  os << "r,F\n";
  for (std::size_t i = 0; i < cdf.radii.size(); ++i) os << io::fmt(cdf.radii[i]) << "," << io::fmt(cdf.mass[i]) << "\n";
  return os.str();
}

Annulus support_annulus(const PositiveMeasure& mu_sq) {
  if (mu_sq.is_point_mass()) throw DegenerateMeasure("support_annulus: point mass");
  const ExtendedReal m_neg2 = moment_p(mu_sq, -1.0);
  const ExtendedReal m2 = moment_p(mu_sq, 1.0);
  Annulus a;
  a.inner = m_neg2.is_finite() ? 1.0 / std::sqrt(m_neg2.value) : 0.0;
  a.outer = m2.is_finite() ? ExtendedReal::finite(std::sqrt(m2.value)) : ExtendedReal::infinity();
  return a;
}

RadialCDF radial_cdf_from_S(const PositiveMeasure& mu_sq, std::span<const double> r_grid) {
  if (mu_sq.is_point_mass()) throw DegenerateMeasure("radial_cdf_from_S: point mass");
  const Annulus ann = support_annulus(mu_sq);
  RadialCDF out;
  out.inner_radius = ann.inner;
  out.outer_radius = ann.outer;
  out.atom0 = mu_sq.atom_at_zero();
  for (double r : r_grid) {
    if (r < 0.0) throw DomainError("radial_cdf_from_S: negative radius");
    double F = 0.0;
    if (r <= ann.inner) {
      F = out.atom0;
    } else if (r >= ann.outer.as_double()) {
      F = 1.0;
    } else {
      // S is increasing in tau where 1 + u = int dmu / (1 + tau x)
      const double target = -2.0 * std::log(r);
      auto h = [&](double s) { return std::log(s_transform_at_tau(mu_sq, std::exp(s)).S) - target; };
      double lo = -1.0, hi = 1.0;
      while (lo > -700.0 && h(lo) > 0.0) lo *= 2.0;
      while (hi < 700.0 && h(hi) < 0.0) hi *= 2.0;
      double s = 0.0;
      if (h(lo) > 0.0) {
        s = lo;
      } else if (h(hi) < 0.0) {
        s = hi;
      } else {
        s = roots::bisect(h, lo, hi, 1e-16, 400);
      }
      const double tau = std::exp(s);
      F = mu_sq.integrate([tau](double x) { return 1.0 / (1.0 + tau * x); });
    }
    out.radii.push_back(r);
    out.mass.push_back(F);
  }
  return out;
}

RadialCDF radial_cdf_from_S(const std::function<double(double)>& S, std::span<const double> r_grid, double atom0) {
  RadialCDF out;
  out.atom0 = atom0;
  const double s0 = s_at_zero(S);
  out.outer_radius = s0 > 0.0 ? ExtendedReal::finite(1.0 / std::sqrt(s0)) : ExtendedReal::infinity();
  if (atom0 > 0.0) {
    out.inner_radius = 0.0;
  } else {
    const ExtendedReal lim = s_limit_at_minus_one(S);
    out.inner_radius = lim.is_finite() ? 1.0 / std::sqrt(lim.value) : 0.0;
  }
  const double lo_u = atom0 - 1.0;
  for (double r : r_grid) {
    if (r < 0.0) throw DomainError("radial_cdf_from_S: negative radius");
    double F = 0.0;
    if (r <= out.inner_radius) {
      F = atom0;
    } else if (r >= out.outer_radius.as_double()) {
      F = 1.0;
    } else {
      const double target = -2.0 * std::log(r);
      auto g = [&](double u) { return std::log(S(u)) - target; };
      const double a = lo_u + 1e-16;
      const double b = -1e-300;
      if (g(a) <= 0.0) {
        F = atom0;
      } else if (g(b) >= 0.0) {
        F = 1.0;
      } else {
        F = 1.0 + roots::bisect(g, a, b, 1e-16, 2000);
      }
    }
    out.radii.push_back(r);
    out.mass.push_back(F);
  }
  return out;
}

RadialCDF radial_cdf_via_theta(const std::function<double(double)>& phi_hat, std::span<const double> r_grid) {
  auto theta = [&](double q) { return 1.0 + phi_hat(q) / q; };
  // r(q)^2 = q^2 theta (1 - theta) with 1 - theta = -phi_hat/q
  auto r2 = [&](double q) {
    const double ph = phi_hat(q);
    return -q * (1.0 + ph / q) * ph;
  };
  // lower end q0 of {theta > 0}
  double q0 = 0.0;
  if (theta(1.0) > 0.0) {
    double q = 1.0;
    while (q > 1e-300 && theta(q) > 0.0) q *= 0.5;
    if (theta(q) <= 0.0) q0 = roots::bisect([&](double x) { return theta(x); }, q, 2.0 * q, 1e-16);
  } else {
    const double q = roots::expand_until([&](double x) { return theta(x) > 0.0; }, 2.0, 2.0);
    q0 = roots::bisect([&](double x) { return theta(x); }, 0.5 * q, q, 1e-16);
  }
  const double atom0 = q0 > 0.0 ? 0.0 : std::max(theta(1e-300), 0.0);

  RadialCDF out;
  out.atom0 = atom0;
  out.inner_radius = 0.0;
  {
    // outer radius: limit of r(q) as q grows
    std::vector<double> vals;
    for (int j = 0; j <= 60; j += 4) vals.push_back(std::sqrt(std::max(r2(std::max(q0, 1.0) * std::ldexp(1.0, j)), 0.0)));
    out.outer_radius = quad::diverging(vals) || !std::isfinite(vals.back()) ? ExtendedReal::infinity()
                                                                           : ExtendedReal::finite(vals.back());
  }
  for (double r : r_grid) {
    if (r < 0.0) throw DomainError("radial_cdf_via_theta: negative radius");
    double F = atom0;
    if (r > 0.0) {
      const double target = r * r;
      const double start = q0 > 0.0 ? q0 : 1e-300;
      double hi = std::max(2.0 * start, 1.0);
      while (hi < 1e300 && r2(hi) < target) hi *= 2.0;
      if (r2(hi) < target) {
        F = 1.0;
      } else {
        auto g = [&](double q) { return r2(q) - target; };
        const double q = q0 > 0.0 ? roots::bisect(g, q0, hi, 1e-16, 2000) : roots::bisect_log(g, start, hi, 1e-16);
        F = std::clamp(theta(q), 0.0, 1.0);
      }
    }
    out.radii.push_back(r);
    out.mass.push_back(F);
  }
  return out;
}

RadialCDF radial_cdf_via_theta(const GeneratingPair& pair, std::span<const double> r_grid) {
  return radial_cdf_via_theta([&pair](double q) { return phi_imag_from_pair(pair, q); }, r_grid);
}

ExtendedReal fid_m_neg2_check(const PositiveMeasure& mu_sq) {
  if (mu_sq.atom_at_zero() > 0.0) return ExtendedReal::infinity();
  return s_limit_at_minus_one(mu_sq);
}

ExtendedReal fid_m_neg2_check(const std::function<double(double)>& S) { return s_limit_at_minus_one(S); }

bool property_H_predicate(double kernel_mass, const PositiveMeasure& mu_sq) {
  if (kernel_mass > kLabelTol) return false;
  return !moment_p(mu_sq, 1.0).is_finite();
}

bool property_H_predicate(double kernel_mass, const std::function<double(double)>& S) {
  if (kernel_mass > kLabelTol) return false;
  return s_at_zero(S) == 0.0;
}

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::S:
      return "S";
    case RegionLabel::F1:
      return "F1";
    case RegionLabel::F2:
      return "F2";
    case RegionLabel::Omega:
      return "Omega";
  }
  return "?";
}

OperatorMoments moments_of_modulus_sq(const PositiveMeasure& mu_sq) {
  OperatorMoments m;
  m.kernel = mu_sq.atom_at_zero();
  m.m2 = moment_p(mu_sq, 1.0);
  m.m_neg2 = moment_p(mu_sq, -1.0);
  return m;
}

OperatorMoments moments_of_shift(const X0Spec& x0, cplx lambda) {
  return std::visit(
      [&](const auto& s) -> OperatorMoments {
        using T = std::decay_t<decltype(s)>;
        OperatorMoments m;
        if constexpr (std::is_same_v<T, ScalarX0>) {
          throw ScalarOperand("classify_support_point: X0 is a scalar");
        } else if constexpr (std::is_same_v<T, SelfAdjointX0>) {
          const RealMeasure& nu = s.law;
          if (nu.is_point_mass()) throw ScalarOperand("classify_support_point: X0 is a scalar");
          const bool real = lambda.imag() == 0.0;
          m.kernel = real ? nu.atom_mass_at(lambda.real(), kLabelTol) : 0.0;
          m.m2 = ExtendedReal::finite(nu.integrate([&](double x) { return std::norm(x - lambda); }));
          bool inside_density = false;
          if (real && !nu.nodes().empty()) {
            inside_density = lambda.real() > nu.nodes().front().x && lambda.real() < nu.nodes().back().x;
          }
          if (m.kernel > 0.0 || inside_density) {
            m.m_neg2 = ExtendedReal::infinity();
          } else {
            m.m_neg2 = ExtendedReal::finite(nu.integrate([&](double x) { return 1.0 / std::norm(x - lambda); }));
          }
        } else {
          const PositiveMeasure& mod = s.modulus;
          if (mod.is_point_mass() && *mod.point_location() == 0.0) {
            throw ScalarOperand("classify_support_point: X0 is a scalar");
          }
          const double a = std::abs(lambda);
          const ExtendedReal m2 = moment_p(mod, 2.0);
          m.m2 = m2.is_finite() ? ExtendedReal::finite(m2.value + a * a) : m2;
          if (a == 0.0) {
            m.kernel = mod.atom_at_zero();
            m.m_neg2 = moment_p(mod, -2.0);
          } else {
            // G(y)/y of bernoulli(|lambda|) [+] symmetrized |X0| as y -> 0
            const Law b = Law::of(SymmetricMeasure::bernoulli(a));
            const Law x = Law::of(symmetrize(mod));
            std::vector<double> vals;
            for (int j = 10; j <= 24; ++j) {
              const double y = std::ldexp(1.0, -j);
              vals.push_back(subordinate_imag_symmetric(b, x, y).G / y);
            }
            m.m_neg2 = quad::diverging(vals) ? ExtendedReal::infinity() : ExtendedReal::finite(vals.back());
          }
        }
        return m;
      },
      x0);
}

RegionLabel classify_support_point(const OperatorMoments& x, const OperatorMoments& y) {
  auto inv = [](const ExtendedReal& v) { return v.is_finite() ? 1.0 / v.value : 0.0; };
  auto at_most = [](const ExtendedReal& a, double b) {
    if (!a.is_finite()) return false;
    return a.value <= b + kLabelTol * (1.0 + std::abs(b));
  };
  if (x.kernel + y.kernel >= 1.0 - kLabelTol) return RegionLabel::S;
  if (at_most(y.m2, inv(x.m_neg2))) return RegionLabel::F1;
  if (at_most(x.m2, inv(y.m_neg2))) return RegionLabel::F2;
  return RegionLabel::Omega;
}

RegionLabel classify_support_point(const X0Spec& x0, const PositiveMeasure& y_sq, cplx lambda) {
  if (y_sq.is_point_mass() && *y_sq.point_location() == 0.0) {
    throw ScalarOperand("classify_support_point: Y is a scalar");
  }
  return classify_support_point(moments_of_shift(x0, lambda), moments_of_modulus_sq(y_sq));
}

double half_log_trace(const SymmetricMeasure& mu, double w) {
  const double w2 = w * w;
  return 0.5 * mu.modulus().integrate([w2](double x) { return std::log(x * x + w2); });
}

LogPotential log_potential_decomposition(const SymmetricMeasure& x1_at_lambda, const SymmetricMeasure& y_rdiag,
                                         double y) {
  if (!(y > 0.0)) throw DomainError("log_potential_decomposition: y must be positive");
  const ImagSubordination s = subordinate_imag_symmetric(Law::of(x1_at_lambda), Law::of(y_rdiag), y);
  LogPotential lp;
  lp.W1 = s.W1;
  lp.W2 = s.W2;
  lp.G = s.G;
  lp.term1 = half_log_trace(x1_at_lambda, s.W1);
  lp.term2 = half_log_trace(y_rdiag, s.W2);
  lp.term3 = -std::log(s.W1 + s.W2 - y);
  lp.total = lp.term1 + lp.term2 + lp.term3;
  return lp;
}

}  // namespace frdiag
