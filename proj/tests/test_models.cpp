#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frdiag/errors.hpp"
#include "frdiag/models.hpp"
#include "frdiag/transforms.hpp"
#include "oracles.hpp"

using namespace frdiag;

TEST_CASE("s_transform_xmk") {
  CHECK(s_transform_xmk(1, 0, -0.5) == 2.0);
  CHECK(s_transform_xmk(1, 1, -0.5) == 1.0);
  CHECK(s_transform_xmk(2, 3, -0.5) == 0.5);
  CHECK_THROWS_AS(s_transform_xmk(1, 1, 0.0), DomainError);
  CHECK_THROWS_AS(s_transform_xmk(1, 1, -1.0), DomainError);
}

TEST_CASE("S-transform product law") {
  for (int m1 = 1; m1 <= 2; ++m1) {
    for (int k1 = 0; k1 <= 2; ++k1) {
      for (int m2 = 1; m2 <= 2; ++m2) {
        for (int k2 = 0; k2 <= 2; ++k2) {
          for (double u : {-0.9, -0.5, -0.01}) {
            CHECK(s_transform_xmk(m1 + m2, k1 + k2, u) ==
                  doctest::Approx(s_transform_xmk(m1, k1, u) * s_transform_xmk(m2, k2, u)).epsilon(1e-15));
          }
        }
      }
    }
  }
}

TEST_CASE("radial_cdf_xmk") {
  CHECK(radial_cdf_xmk(1, 0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(radial_cdf_xmk(1, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(radial_cdf_xmk(2, 1, 1.0) - (std::sqrt(5.0) - 1.0) / 2.0) < 1e-12);
  CHECK(radial_cdf_xmk(1, 0, 1.5) == 1.0);
  CHECK_THROWS_AS(radial_cdf_xmk(1, 1, 0.0), DomainError);
}

TEST_CASE("radial_cdf_xmk is monotone and inverts r(F)") {
  for (int m = 1; m <= 3; ++m) {
    for (int k = 0; k <= 3; ++k) {
      double prev = 0.0;
      for (int i = 1; i <= 40; ++i) {
        const double r = 0.05 * i;
        const double F = radial_cdf_xmk(m, k, r);
        CHECK(F >= prev);
        prev = F;
      }
      for (double F : {0.01, 0.3, 0.7, 0.99}) {
        const double r = std::sqrt(std::pow(F, m) / std::pow(1.0 - F, k));
        if (k == 0 && r >= 1.0) continue;
        CHECK(std::abs(radial_cdf_xmk(m, k, r) - F) < 1e-12);
      }
    }
  }
}

TEST_CASE("w_of_s") {
  CHECK(w_of_s(1, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // w = (1-w)^2
  CHECK(std::abs(w_of_s(1, 0, 1.0) - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-14);
  for (int m = 1; m <= 3; ++m) {
    for (int k = 0; k <= 3; ++k) CHECK(w_of_s(m, k, 1e-3) < w_of_s(m, k, 1e-2));
  }
  for (double s : {1e-6, 0.2, 5.0, 1e6}) {
    const double w = w_of_s(2, 1, s);
    CHECK(std::pow(w, 2) / std::pow(1.0 - w, 3) == doctest::Approx(s * s).epsilon(1e-10));
  }
}

TEST_CASE("lp_moment_xmk") {
  CHECK(std::abs(lp_moment_xmk(1, 1, 0.5) - std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(oracle::lp_moment_w_quadrature(1, 1, 0.5) - std::sqrt(2.0)) < 1e-8);
  CHECK_THROWS_AS(lp_moment_xmk(1, 1, 1.0), ThresholdExceeded);
  CHECK_THROWS_AS(lp_moment_xmk(2, 3, 0.5), ThresholdExceeded);
  CHECK_THROWS_AS(lp_moment_xmk(1, 1, 0.0), ThresholdExceeded);

  // z^2 with z circular Cauchy has the *-distribution of X_{2,2}
  CHECK(std::abs(lp_moment_xmk(2, 2, 0.3) - oracle::lp_moment_w_quadrature(2, 2, 0.3)) < 1e-8);

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> mk(1, 4);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int n = 0; n < 10; ++n) {
    const int m = mk(rng);
    const int k = mk(rng);
    const double p = frac(rng) * 2.0 / (k + 1);
    CHECK(std::abs(lp_moment_xmk(m, k, p) - oracle::lp_moment_w_quadrature(m, k, p)) < 1e-8);
  }
}

TEST_CASE("model_transforms closed forms") {
  const ModelTransforms sc = model_transforms(Semicircle{1.0});
  for (double y : {0.5, 2.0}) {
    CHECK(sc.r_imag(y) == y);
    CHECK(sc.phi_imag(y) == -1.0 / y);
  }
  const ModelTransforms sc3 = model_transforms(Semicircle{3.0});
  CHECK(sc3.r_imag(2.0) == 6.0);
  CHECK(sc3.pair->sigma_mass == 3.0);

  const ModelTransforms ca = model_transforms(SymCauchy{1.0});
  CHECK(std::abs(phi_from_pair(*ca.pair, cplx(0.0, 2.0)) - cplx(0.0, -1.0)) < 1e-8);
  const ModelTransforms fs1 = model_transforms(SymFreeStable{1, 1.0});
  for (double y : {0.1, 1.0, 10.0}) CHECK(fs1.r_imag(y) == ca.r_imag(y));

  const ModelTransforms fs = model_transforms(SymFreeStable{3, 2.0});
  CHECK(fs.r_imag(4.0) == doctest::Approx(2.0 * 0.5));
  CHECK(fs.phi_imag(4.0) == doctest::Approx(-2.0 * std::sqrt(4.0)));

  const ModelTransforms mp = model_transforms(MarchenkoPastur1{});
  REQUIRE(mp.mu_sq.has_value());
  CHECK(mp.mu_sq->density(1.0) == doctest::Approx(oracle::mp1_density(1.0)).epsilon(1e-12));
}

TEST_CASE("catalog phi against materialised densities") {
  for (double v : {2.5, 5.0}) {
    CHECK(std::abs(model_transforms(Semicircle{1.0}).phi_imag(v) - phi_imag_axis(semicircle_measure(1.0), v)) < 1e-8);
  }
  for (double v : {1.5, 5.0}) {
    CHECK(std::abs(model_transforms(SymCauchy{1.0}).phi_imag(v) - phi_imag_axis(cauchy_measure(1.0), v)) < 1e-8);
  }
}

TEST_CASE("materialised X_{m,k} laws") {
  const PositiveMeasure x20 = xmk_mu_sq(2, 0);
  CHECK(x20.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  // Fuss-Catalan moments of Pi_1 boxtimes Pi_1: 1, 3, 12
  CHECK(moment_p(x20, 1.0).value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(moment_p(x20, 2.0).value == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(moment_p(x20, 3.0).value == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(xm0_edge(2) == 6.75);
  // S(u) = -u/(1+u) inverts in closed form: density 1/(pi sqrt(x) (1+x))
  CHECK(xmk_sq_density(1, 1, 0.7) == doctest::Approx(1.0 / (std::numbers::pi * std::sqrt(0.7) * 1.7)).epsilon(1e-10));
  CHECK_THROWS_AS(xmk_mu_sq(2, 3), Unsupported);
}

TEST_CASE("parsing") {
  CHECK(std::get<Semicircle>(parse_model("semicircle:t=2")).t == 2.0);
  CHECK(std::get<SymCauchy>(parse_model("cauchy:t=0.5")).t == 0.5);
  const auto fs = std::get<SymFreeStable>(parse_model("fstable:k=2,t=1"));
  CHECK(fs.k == 2);
  const auto x = std::get<Xmk>(parse_model("xmk:m=2,k=1"));
  CHECK(x.m == 2);
  CHECK(x.k == 1);
  CHECK(std::holds_alternative<MarchenkoPastur1>(parse_model("mp1")));
  CHECK_THROWS_AS(parse_model("xmk:m=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model("gauss"), std::invalid_argument);
  CHECK(to_string(parse_model("xmk:m=2,k=1")) == to_string(ModelSpec{Xmk{2, 1}}));
  CHECK(std::get<ScalarX0>(parse_x0("scalar:1,2")).c == cplx(1.0, 2.0));
  CHECK(std::holds_alternative<SelfAdjointX0>(parse_x0("bernoulli:a=1")));
}
