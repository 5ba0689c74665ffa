#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "frdiag/measure.hpp"
#include "frdiag/transforms.hpp"

namespace frdiag {

struct Semicircle {
  double t = 1.0;  // variance
};
struct SymCauchy {
  double t = 1.0;  // scale
};
struct SymFreeStable {
  int k = 0;
  double t = 1.0;
};
struct MarchenkoPastur1 {};
struct Xmk {
  int m = 1;
  int k = 0;
};

using ModelSpec = std::variant<Semicircle, SymCauchy, SymFreeStable, MarchenkoPastur1, Xmk>;

/// Parses `semicircle:t=1`, `cauchy:t=2`, `fstable:k=2,t=1`, `xmk:m=2,k=1`, `mp1`.
ModelSpec parse_model(const std::string& text);
std::string to_string(const ModelSpec& spec);

/// Initial data X0: a scalar, a self-adjoint law, or an R-diagonal element
/// given by the law of |X0|.
struct ScalarX0 {
  std::complex<double> c;
};
struct SelfAdjointX0 {
  RealMeasure law;
};
struct RDiagonalX0 {
  PositiveMeasure modulus;
};
using X0Spec = std::variant<ScalarX0, SelfAdjointX0, RDiagonalX0>;

/// Parses `scalar:<re>[,<im>]` and `bernoulli:a=<a>` (self-adjoint (1/2)(delta_a + delta_-a)).
X0Spec parse_x0(const std::string& text);

/// (-u)^k / (1 + u)^m.
double s_transform_xmk(int m, int k, double u);

/// F in (0, 1) with r^2 = F^m / (1 - F)^k.
double radial_cdf_xmk(int m, int k, double r);

/// w in (0, 1) with s^2 = w^(k+1) / (1 - w)^(m+1).
double w_of_s(int m, int k, double s);

/// tau(|X_{m,k}|^p) for 0 < p < 2/(k+1).
double lp_moment_xmk(int m, int k, double p);

/// Fuss-Catalan edge (m+1)^(m+1) / m^m of the law of |X_{m,0}|^2.
double xm0_edge(int m);

/// Closed forms attached to a catalog model. Every callable refers to the
/// symmetrized modulus law mu of the model element Y; s_transform is the
/// S-transform of the law of |Y|^2.
struct ModelTransforms {
  std::function<double(double)> phi_imag;
  std::function<double(double)> r_imag;
  std::function<double(double)> s_transform;
  std::optional<GeneratingPair> pair;
  std::optional<PositiveMeasure> mu_sq;
  /// The symmetric law as a Cauchy transform (closed form where available).
  std::optional<Law> law;
  /// H(y) = int_0^y R, when known in closed form.
  std::function<double(double)> hamiltonian;
};

ModelTransforms model_transforms(const ModelSpec& spec);

/// Materialised law of |Y|^2 (Unsupported when not available).
PositiveMeasure model_mu_sq(const ModelSpec& spec);

/// Densities used by the catalog.
PositiveMeasure marchenko_pastur1();
PositiveMeasure quarter_circle(double variance = 1.0);
PositiveMeasure half_cauchy(double scale = 1.0);
SymmetricMeasure semicircle_measure(double variance = 1.0);
SymmetricMeasure cauchy_measure(double scale = 1.0);
/// Law of |X_{m,k}|^2 for m + k <= 4, recovered from the S-transform.
PositiveMeasure xmk_mu_sq(int m, int k);
double xmk_sq_density(int m, int k, double x);

}  // namespace frdiag
