#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "frdiag/measure.hpp"
#include "frdiag/models.hpp"

namespace frdiag {

struct MCConfig {
  int N = 256;
  int trials = 10;
  std::uint64_t seed = 1;
};

struct EmpiricalLaw {
  enum class Kind { eigen_moduli, symmetrized_singular };
  Kind kind = Kind::eigen_moduli;
  std::vector<double> values;  // ascending
};

std::string to_string(EmpiricalLaw::Kind kind);

/// splitmix64 finaliser; trial streams are seeded with splitmix64(seed ^ trial).
std::uint64_t splitmix64(std::uint64_t x);

/// Eigenvalues of G_1...G_m (G_{m+1}...G_{m+k})^-1 over all trials, trial
/// order preserved.
std::vector<std::complex<double>> sample_xmk_eigenvalues(const MCConfig& cfg, int m, int k);
EmpiricalLaw sample_xmk_eigen(const MCConfig& cfg, int m, int k);

/// +- singular values of A + U B U* with A realised from x0 and B from an
/// R-diagonal model, U Haar.
EmpiricalLaw free_add_oracle(const X0Spec& a, const ModelSpec& b, const MCConfig& cfg);

/// +- singular values of G1 G2 + sign G2 G1 and the reference law
/// (symmetrized |c1 c2|) [+] (symmetrized |c1 c2|) on a grid.
struct CommutatorResult {
  EmpiricalLaw sample;
  std::vector<double> ref_x;
  std::vector<double> ref_cdf;
  double ks = 0.0;
};
CommutatorResult commutator_oracle(const MCConfig& cfg, int sign = -1);

/// +- singular values of G1 G2 against the symmetrized law of |c1 c2|.
struct ProductResult {
  EmpiricalLaw sample;
  double ks = 0.0;
};
ProductResult product_oracle(const MCConfig& cfg);

/// sup |F_n - F| over sample points in [lo, hi]; both one-sided limits of
/// F_n are compared, F is taken right-continuous.
double ks_distance(const EmpiricalLaw& sample, const std::function<double(double)>& cdf,
                   double lo = -std::numeric_limits<double>::infinity(),
                   double hi = std::numeric_limits<double>::infinity());

/// Piecewise-linear CDF through (x, F) pairs, clamped to [0, 1] outside.
std::function<double(double)> tabulated_cdf(std::vector<double> x, std::vector<double> F);

/// Cumulative trapezoid of a density on a grid, normalised to end at one.
std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& density);

/// Single column `value`.
std::string to_csv(const EmpiricalLaw& law);
/// Config echo plus named KS results.
std::string meta_json(const MCConfig& cfg, const std::string& what,
                      const std::vector<std::pair<std::string, double>>& ks);

}  // namespace frdiag
