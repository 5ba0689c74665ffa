#pragma once

#include <span>
#include <vector>

#include "frdiag/transforms.hpp"

namespace frdiag {

struct SubordinationPoint {
  cplx z;
  cplx omega1;
  cplx omega2;
  cplx F_value;
  double residual_F = 0.0;
  double residual_sum = 0.0;
  int iterations = 0;
};

struct SubordinationOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  /// Steps without a decrease of |w_{n+1} - w_n| before damping kicks in.
  int oscillation_window = 50;
};

/// Subordination functions of mu1 [+] mu2 at z: omega1 is the fixed point of
/// w -> h2(h1(w) + z) + z with h = F - id.
SubordinationPoint subordinate(const Law& mu1, const Law& mu2, cplx z, SubordinationOptions opt = {});

/// G of mu1 [+] mu2 at z; point masses handled as translations.
cplx convolved_G(const Law& mu1, const Law& mu2, cplx z);

/// Purely imaginary subordination for symmetric laws at i*eps:
/// F1(iW1) = F2(iW2) = F(i eps) and 1/G = W1 + W2 - eps.
struct ImagSubordination {
  double W1;
  double W2;
  double G;
};
ImagSubordination subordinate_imag_symmetric(const Law& mu1, const Law& mu2, double eps);

/// Stieltjes inversion of G of mu1 [+] mu2 on x_grid, with Richardson
/// extrapolation over eta and eta/2. Renormalised by the trapezoid mass.
struct ConvolvedDensity {
  std::vector<double> x;
  std::vector<double> density;
  double raw_mass = 0.0;
};
ConvolvedDensity convolve_density(const Law& mu1, const Law& mu2, std::span<const double> x_grid, double eta);

/// H(z) = z + phi(F_mu0(z)) for the pair of an infinitely divisible law.
cplx fid_H_map(const Law& mu0, const GeneratingPair& pair, cplx z);
bool in_omega_H(const Law& mu0, const GeneratingPair& pair, cplx z);

}  // namespace frdiag
