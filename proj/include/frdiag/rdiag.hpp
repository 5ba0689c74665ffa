#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "frdiag/measure.hpp"
#include "frdiag/models.hpp"
#include "frdiag/transforms.hpp"

namespace frdiag {

/// Radial distribution function r -> mu_X({|z| <= r}) of an R-diagonal Brown measure.
struct RadialCDF {
  std::vector<double> radii;
  std::vector<double> mass;
  double inner_radius = 0.0;
  ExtendedReal outer_radius;
  double atom0 = 0.0;
};

/// CSV with header `r,F`.
std::string to_csv(const RadialCDF& cdf);

/// F(r) = 1 + S^<-1>(r^-2) between the inner and outer radius.
RadialCDF radial_cdf_from_S(const PositiveMeasure& mu_sq, std::span<const double> r_grid);
/// Same from a closed-form S-transform on (atom0 - 1, 0).
RadialCDF radial_cdf_from_S(const std::function<double(double)>& S, std::span<const double> r_grid,
                            double atom0 = 0.0);

/// theta(q) = 1 + phi_hat(q)/q and r(q)^2 = q^2 theta (1 - theta), inverted
/// for q at every requested radius.
RadialCDF radial_cdf_via_theta(const std::function<double(double)>& phi_hat, std::span<const double> r_grid);
RadialCDF radial_cdf_via_theta(const GeneratingPair& pair, std::span<const double> r_grid);

struct Annulus {
  double inner;
  ExtendedReal outer;
};
Annulus support_annulus(const PositiveMeasure& mu_sq);

/// m_{-2} through the S-transform limit at -1; +inf for every infinitely
/// divisible R-diagonal element.
ExtendedReal fid_m_neg2_check(const PositiveMeasure& mu_sq);
ExtendedReal fid_m_neg2_check(const std::function<double(double)>& S);

/// Kernel zero and infinite second moment.
bool property_H_predicate(double kernel_mass, const PositiveMeasure& mu_sq);
bool property_H_predicate(double kernel_mass, const std::function<double(double)>& S);

/// Kernel mass, m_2 and m_{-2} of an operator.
struct OperatorMoments {
  double kernel = 0.0;
  ExtendedReal m2;
  ExtendedReal m_neg2;
};
OperatorMoments moments_of_modulus_sq(const PositiveMeasure& mu_sq);
OperatorMoments moments_of_shift(const X0Spec& x0, cplx lambda);

enum class RegionLabel { S, F1, F2, Omega };
std::string to_string(RegionLabel label);

RegionLabel classify_support_point(const X0Spec& x0, const PositiveMeasure& y_sq, cplx lambda);
RegionLabel classify_support_point(const OperatorMoments& x0_shift, const OperatorMoments& y);

/// (1/2) tau log(|X1 - lambda|^2 + W1^2), (1/2) tau log(|X2|^2 + W2^2),
/// -log(W1 + W2 - y) and their sum (1/2) tau log(|X1 + X2 - lambda|^2 + y^2).
struct LogPotential {
  double term1;
  double term2;
  double term3;
  double total;
  double W1;
  double W2;
  double G;
};
LogPotential log_potential_decomposition(const SymmetricMeasure& x1_at_lambda, const SymmetricMeasure& y_rdiag,
                                         double y);

/// (1/2) int log(x^2 + w^2) dmu(x) for a symmetric law.
double half_log_trace(const SymmetricMeasure& mu, double w);

}  // namespace frdiag
