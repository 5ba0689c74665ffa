#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frdiag {

/// A value in [0, +inf]. Used wherever an integral may legitimately diverge.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal infinity() { return {0.0, true}; }
  static ExtendedReal finite(double v) { return {v, false}; }

  bool is_finite() const { return !infinite; }
  double as_double() const { return infinite ? std::numeric_limits<double>::infinity() : value; }
};

std::string to_string(const ExtendedReal& v);

struct Atom {
  double x;
  double mass;
};

/// One quadrature node of an absolutely continuous part: mass density * weight at x.
struct DensityNode {
  double x;
  double density;
  double weight;
};

/// Where a density lives. `hi` may be +inf; `scale` is the split point offset
/// used to map a semi-infinite support onto two finite pieces (about the
/// median of the measure).
struct DensitySupport {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double scale = 1.0;
};

/// Grid resolution: each of the two pieces of the support carries
/// levels + 1 graded panels of 64 Gauss-Legendre nodes. The default gives
/// 4096 nodes.
struct GridOptions {
  int levels = 31;
};

/// Places graded Gauss-Legendre nodes for `density` on `support`.
std::vector<DensityNode> graded_nodes(const std::function<double(double)>& density,
                                      const DensitySupport& support, int levels);

/// Probability measure on [0, inf): an atom at zero, atoms at positive
/// locations and quadrature nodes of an absolutely continuous part.
/// Immutable; copies share storage.
class PositiveMeasure {
 public:
  PositiveMeasure();  // the Dirac mass at 0

  static PositiveMeasure dirac(double x);
  static PositiveMeasure from_atoms(double atom0, std::vector<Atom> atoms);
  /// First `count` terms (n = 1..count) of an infinite atom sequence. The
  /// remaining mass goes to the last atom. Integrals against such a measure
  /// are tested for divergence through their partial sums.
  static PositiveMeasure from_atom_sequence(const std::function<Atom(int)>& term, int count);
  /// Density part from a callable; normalised to total mass one when the
  /// quadrature defect is below 1e-6 (MassDefect otherwise).
  static PositiveMeasure from_density(std::function<double(double)> density, DensitySupport support,
                                      double atom0 = 0.0, std::vector<Atom> atoms = {},
                                      GridOptions grid = {});
  /// Raw representation (e.g. after deserialisation); not refinable.
  static PositiveMeasure from_nodes(double atom0, std::vector<Atom> atoms,
                                    std::vector<DensityNode> nodes);

  double atom_at_zero() const;
  std::span<const Atom> atoms() const;
  std::span<const DensityNode> nodes() const;
  double total_mass() const;

  /// Some location carries all the mass.
  std::optional<double> point_location() const;
  bool is_point_mass() const { return point_location().has_value(); }

  bool has_density() const;
  bool is_atom_sequence() const;
  /// Density value (0 off the support or without a density part).
  double density(double x) const;
  double cdf(double x) const;

  /// Sum of g over atoms (the atom at zero included) and density nodes.
  template <class G>
  auto integrate(G&& g) const {
    using R = decltype(g(1.0));
    R acc = R(atom_at_zero()) * g(0.0);
    for (const Atom& a : atoms()) acc += R(a.mass) * g(a.x);
    for (const DensityNode& n : nodes()) acc += R(n.density * n.weight) * g(n.x);
    return acc;
  }

  /// int dmu(t) / (z - t) for Im z > 0. Near a finite density support the
  /// first-order Taylor part of the density at Re z is integrated exactly,
  /// which keeps the node sum accurate for Im z well below the node spacing.
  std::complex<double> cauchy_transform(std::complex<double> z) const;

  /// Integral of g >= 0 over (0, inf) (the atom at zero excluded), with
  /// divergence detection: three successive grid refinements (or atom
  /// partial sums) each growing the estimate by >= 1%.
  ExtendedReal integrate_positive(const std::function<double(double)>& g) const;

  /// Estimates of the density-part integral at the default resolution and
  /// at `extra` successively refined resolutions.
  std::vector<double> refinement_estimates(const std::function<double(double)>& g, int extra) const;

  /// Image under x -> a x.
  PositiveMeasure dilate(double a) const;

  struct Data;

 private:
  explicit PositiveMeasure(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;

  friend PositiveMeasure square_pushforward(const PositiveMeasure&);
  friend PositiveMeasure sqrt_pushforward(const PositiveMeasure&);
};

/// Symmetric probability measure on R, stored as the law of |X| (its
/// restriction to [0, inf) folded, mass at zero unhalved).
class SymmetricMeasure {
 public:
  SymmetricMeasure() = default;
  explicit SymmetricMeasure(PositiveMeasure modulus) : modulus_(std::move(modulus)) {}

  /// (1/2)(delta_a + delta_{-a}).
  static SymmetricMeasure bernoulli(double a);

  const PositiveMeasure& modulus() const { return modulus_; }
  double mass_at_zero() const { return modulus_.atom_at_zero(); }
  bool is_point_mass() const;
  double total_mass() const { return modulus_.total_mass(); }

  /// Integral of g against the symmetric measure. Odd parts cancel exactly.
  template <class G>
  auto integrate(G&& g) const {
    return modulus_.integrate([&](double x) { return 0.5 * (g(x) + g(-x)); });
  }

  double cdf(double x) const;

 private:
  PositiveMeasure modulus_;
};

/// Probability measure on R (atoms plus density nodes), for self-adjoint
/// initial data that need not be symmetric.
class RealMeasure {
 public:
  static RealMeasure from_atoms(std::vector<Atom> atoms);
  static RealMeasure from_nodes(std::vector<Atom> atoms, std::vector<DensityNode> nodes);
  static RealMeasure from_symmetric(const SymmetricMeasure& mu);

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const DensityNode> nodes() const { return nodes_; }
  double total_mass() const;
  std::optional<double> point_location() const;
  bool is_point_mass() const { return point_location().has_value(); }
  /// Mass of atoms located within tol of x.
  double atom_mass_at(double x, double tol = 1e-12) const;

  template <class G>
  auto integrate(G&& g) const {
    using R = decltype(g(1.0));
    R acc = R(0);
    for (const Atom& a : atoms_) acc += R(a.mass) * g(a.x);
    for (const DensityNode& n : nodes_) acc += R(n.density * n.weight) * g(n.x);
    return acc;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<DensityNode> nodes_;
};

/// Integral of t^p. +inf for p < 0 with an atom at zero, or on detected divergence.
ExtendedReal moment_p(const PositiveMeasure& mu, double p);

/// (1/2)(mu(B) + mu(-B)).
SymmetricMeasure symmetrize(const PositiveMeasure& mu);

/// Image under t -> t^2, and its node-wise inverse t -> sqrt(t).
PositiveMeasure square_pushforward(const PositiveMeasure& mu_abs);
PositiveMeasure sqrt_pushforward(const PositiveMeasure& mu_sq);

/// Integral of max(log t, 0), with divergence detection.
ExtendedReal log_plus_integral(const PositiveMeasure& mu);

}  // namespace frdiag
