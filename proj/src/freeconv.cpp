#include "frdiag/freeconv.hpp"

#include <cmath>
#include <numbers>

#include "frdiag/errors.hpp"
#include "frdiag/parallel.hpp"
#include "frdiag/roots.hpp"

namespace frdiag {

SubordinationPoint subordinate(const Law& mu1, const Law& mu2, cplx z, SubordinationOptions opt) {
  if (!(z.imag() > 0.0)) throw DomainError("subordinate: Im z must be positive");
  if (mu1.is_point_mass() || mu2.is_point_mass()) {
    throw DegenerateMeasure("subordinate: point mass operand, translate instead");
  }
  auto h1 = [&](cplx w) { return mu1.F(w) - w; };
  auto h2 = [&](cplx w) { return mu2.F(w) - w; };
  auto T = [&](cplx w) { return h2(h1(w) + z) + z; };

  // Picard iteration; once it has run for a while, safeguarded Newton steps
  // on T(w) - w are tried as well (Picard alone is slow near the real axis)
  cplx w = z;
  double damping = 1.0;
  double best_step = std::numeric_limits<double>::infinity();
  int since_best = 0;
  int it = 0;
  bool done = false;
  for (; it < opt.max_iter && !done; ++it) {
    const cplx tw = T(w);
    const double scale = opt.tol * (1.0 + std::abs(w));
    if (std::abs(tw - w) <= scale) {
      w = tw.imag() > 0.0 ? tw : w;
      break;
    }
    if (it >= 20) {
      const double d = 1e-7 * (1.0 + std::abs(w));
      const cplx dT = (T(w + d) - T(w - d)) / (2.0 * d);
      const cplx newton = w - (tw - w) / (dT - 1.0);
      if (newton.imag() > 0.0 && std::isfinite(newton.real()) && std::isfinite(newton.imag())) {
        const cplx tn = T(newton);
        if (std::abs(tn - newton) < std::abs(tw - w)) {
          done = std::abs(newton - w) <= scale;
          w = newton;
          continue;
        }
      }
    }
    cplx next = tw;
    if (!(next.imag() > 0.0) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) {
      damping = 0.5;
      next = cplx(w.real(), 0.5 * w.imag());
    } else if (damping < 1.0) {
      next = w + damping * (next - w);
    }
    const double step = std::abs(next - w);
    w = next;
    if (step < best_step) {
      best_step = step;
      since_best = 0;
    } else if (++since_best >= opt.oscillation_window) {
      damping = 0.5;
      since_best = 0;
    }
  }
  if (it >= opt.max_iter) throw ConvergenceError("subordinate: no convergence after 1e5 iterations");

  SubordinationPoint p;
  p.z = z;
  p.omega1 = w;
  p.omega2 = h1(w) + z;
  p.F_value = mu1.F(p.omega1);
  p.residual_F = std::abs(p.F_value - mu2.F(p.omega2));
  p.residual_sum = std::abs(p.F_value + z - p.omega1 - p.omega2);
  p.iterations = it + 1;
  return p;
}

cplx convolved_G(const Law& mu1, const Law& mu2, cplx z) {
  if (mu1.is_point_mass() && mu2.is_point_mass()) {
    return 1.0 / (z - (*mu1.point_location() + *mu2.point_location()));
  }
  if (mu1.is_point_mass()) return mu2.G(z - *mu1.point_location());
  if (mu2.is_point_mass()) return mu1.G(z - *mu2.point_location());
  return 1.0 / subordinate(mu1, mu2, z).F_value;
}

ImagSubordination subordinate_imag_symmetric(const Law& mu1, const Law& mu2, double eps) {
  if (!(eps > 0.0)) throw DomainError("subordinate_imag_symmetric: eps must be positive");
  const bool zero1 = mu1.is_point_mass() && *mu1.point_location() == 0.0;
  const bool zero2 = mu2.is_point_mass() && *mu2.point_location() == 0.0;
  if (zero1 && zero2) return {eps, eps, 1.0 / eps};
  if (zero1) {
    const double g = mu2.g_imag(eps);
    return {1.0 / g, eps, g};
  }
  if (zero2) {
    const double g = mu1.g_imag(eps);
    return {eps, 1.0 / g, g};
  }
  auto h1 = [&](double W) { return std::max(1.0 / mu1.g_imag(W) - W, 0.0); };
  auto h2 = [&](double W) { return std::max(1.0 / mu2.g_imag(W) - W, 0.0); };
  auto phi = [&](double W) { return h2(h1(W) + eps) + eps - W; };
  double lo = eps;
  double hi = roots::expand_until([&](double W) { return phi(W) <= 0.0; }, 2.0 * eps, 2.0);
  if (phi(lo) <= 0.0) hi = lo;
  const double W1 = hi == lo ? lo : roots::bisect(phi, lo, hi, 1e-15, 400);
  const double W2 = h1(W1) + eps;
  return {W1, W2, mu1.g_imag(W1)};
}

ConvolvedDensity convolve_density(const Law& mu1, const Law& mu2, std::span<const double> x_grid, double eta) {
  if (!(eta > 0.0)) throw DomainError("convolve_density: eta must be positive");
  if (x_grid.size() < 2) throw DomainError("convolve_density: grid needs at least two points");
  ConvolvedDensity out;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.density.assign(x_grid.size(), 0.0);
  parallel_for(x_grid.size(), [&](std::size_t i) {
    const double x = x_grid[i];
    const double d1 = -convolved_G(mu1, mu2, cplx(x, eta)).imag() / std::numbers::pi;
    const double d2 = -convolved_G(mu1, mu2, cplx(x, 0.5 * eta)).imag() / std::numbers::pi;
    out.density[i] = std::max(2.0 * d2 - d1, 0.0);
  });
  double mass = 0.0;
  for (std::size_t i = 1; i < out.x.size(); ++i) {
    mass += 0.5 * (out.x[i] - out.x[i - 1]) * (out.density[i] + out.density[i - 1]);
  }
  out.raw_mass = mass;
  if (!(std::abs(mass - 1.0) < 1e-3)) {
    throw MassDefect("convolve_density: recovered mass " + std::to_string(mass));
  }
  for (double& d : out.density) d /= mass;
  return out;
}

cplx fid_H_map(const Law& mu0, const GeneratingPair& pair, cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("fid_H_map: Im z must be positive");
  return z + phi_from_pair(pair, mu0.F(z));
}

bool in_omega_H(const Law& mu0, const GeneratingPair& pair, cplx z) { return fid_H_map(mu0, pair, z).imag() > 0.0; }

}  // namespace frdiag
