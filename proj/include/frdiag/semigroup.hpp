#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frdiag/measure.hpp"
#include "frdiag/models.hpp"
#include "frdiag/transforms.hpp"

namespace frdiag {

/// H(y) = int_0^y R and I(y) = 2 H(y) - 2 y R(y) for the model law mu.
struct HamiltonianValue {
  double H;
  double I;
};
HamiltonianValue hamiltonian(const ModelSpec& model, double y);

struct HamiltonianTable {
  std::vector<double> y;
  std::vector<double> H;
  std::vector<double> I;
};
HamiltonianTable hamiltonian_table(const ModelSpec& model, std::span<const double> y_grid);

/// One point of X_t = X0 + Y_t seen at i*eps, lambda fixed.
struct SemigroupState {
  double t = 0.0;
  cplx lambda;
  double eps = 0.0;
  double W1 = 0.0;
  double W2 = 0.0;
  double Gval = 0.0;
  double S_value = 0.0;
  int iterations = 0;
};

/// -Im G(iW) of the symmetrized law of |X0 - lambda|.
double g0_imag(const X0Spec& x0, cplx lambda, double W);

/// tau log(|X0 - lambda|^2 + W^2).
double log_trace(const X0Spec& x0, cplx lambda, double W);

/// W1 = eps + t R(G0(W1)); fills G, W2 and S.
SemigroupState solve_W1(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t, double eps);

/// S(t, lambda, eps) = tau log(|X0 - lambda|^2 + W1^2) + t I(G).
double potential_S(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t, double eps);

/// eps -> 0 limit from eps = 10^-k, k = 4..8, extrapolated linearly in eps.
struct EpsLimit {
  double S0;
  double W1_0;
  double G0;
  /// |W1(0) - t R(G(0))|, only meaningful when W1(0) > 0.
  double identity_residual;
};
EpsLimit potential_S_limit(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t);

/// |dS/dt - 2 H(dS/deps / 2)| by central differences with step h (0 picks
/// 1e-3 max(t, eps)), at h/2, their Richardson combination and with the
/// exact dS/deps = 2 G.
struct HJResidual {
  double h;
  double fd;
  double fd_half;
  double richardson;
  double exact;
  double dS_deps_fd;
  double two_G;
};
HJResidual hj_residual(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t, double eps, double h = 0.0);

/// S along an increasing t grid, with dS/dt = 2 H(G). Throws
/// MonotonicityViolation on a decrease beyond `slack`.
struct MonotonicityScan {
  std::vector<SemigroupState> states;
  std::vector<double> dS_dt;
};
MonotonicityScan det_monotonicity_scan(const X0Spec& x0, cplx lambda, const ModelSpec& model,
                                       std::span<const double> t_grid, double eps, double slack = 1e-10);

/// 1 + t phi_hat(q) / q.
double theta_t(const ModelSpec& model, double t, double q);

/// F(t, r) of the Brown measure of Y_t through the theta_t parametrisation.
double radial_F(const ModelSpec& model, double t, double r);

/// |t F_t + r (2F - 1)/(2F) F_r + 1 - F| by central differences.
double radial_pde_residual(const ModelSpec& model, double t, double r);
/// |t Fh_t - r Fh_r / (2 Fh) + 1 - Fh| for Fh(t, r) = F(t, t r).
double radial_pde_residual_scaled(const ModelSpec& model, double t, double r);

/// The five integrals of the log-integrability test. Each is finite or +inf.
struct LogIntegrabilityReport {
  ExtendedReal log_moment_mu;
  ExtendedReal log_moment_sigma;
  ExtendedReal phi_tail;
  ExtendedReal r_head;
  ExtendedReal f_tail;
  bool agree;
};
LogIntegrabilityReport log_integrability_report(const GeneratingPair& pair, const std::optional<SymmetricMeasure>& mu,
                                                double T);
std::string to_json(const LogIntegrabilityReport& r);

/// sigma with atoms 2^-n at +-exp(2^n), n = 1..8 (residual mass on the last).
GeneratingPair divergent_atomic_pair();

/// Brown density of X_t as the 5-point Laplacian of S/4pi on a lambda grid.
struct BrownDensityGrid {
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> density;  // row-major, im outer
};
BrownDensityGrid brown_density(const X0Spec& x0, const ModelSpec& model, double t, double eps,
                               std::span<const double> re_grid, std::span<const double> im_grid, double h);

/// Sweep over (t, lambda, eps) triples; parallel, order-preserving.
struct SweepPoint {
  double t;
  cplx lambda;
  double eps;
};
std::vector<SemigroupState> semigroup_sweep(const X0Spec& x0, const ModelSpec& model,
                                            std::span<const SweepPoint> points);

/// `t,lambda_re,lambda_im,eps,W1,W2,G,S`
std::string states_csv(std::span<const SemigroupState> states);
/// `t,r,F,residual`
struct RadialPDERow {
  double t;
  double r;
  double F;
  double residual;
};
std::string radial_pde_csv(std::span<const RadialPDERow> rows);

}  // namespace frdiag
