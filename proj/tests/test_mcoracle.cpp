#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#include "frdiag/errors.hpp"
#include "frdiag/freeconv.hpp"
#include "frdiag/mcoracle.hpp"
#include "frdiag/models.hpp"
#include "oracles.hpp"

using namespace frdiag;

// Unit-level runs use smaller N than the acceptance suite; tolerances stay
// at the acceptance values.

namespace {

double circular_cdf(double r) { return std::min(r * r, 1.0); }

std::function<double(double)> convolved_cdf(const Law& a, const Law& b) {
  std::vector<double> x(6001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -4.0 + 8.0 * double(i) / double(x.size() - 1);
  const ConvolvedDensity d = convolve_density(a, b, x, 1e-3);
  return tabulated_cdf(d.x, cumulative_trapezoid(d.x, d.density));
}

}  // namespace

TEST_CASE("ks_distance") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EmpiricalLaw s;
  // inverse CDF of the circular radial law
  for (int i = 0; i < 100000; ++i) s.values.push_back(std::sqrt(u(rng)));
  std::sort(s.values.begin(), s.values.end());
  CHECK(ks_distance(s, circular_cdf) < 0.01);

  EmpiricalLaw c;
  c.values.assign(10, 2.0);
  CHECK(ks_distance(c, [](double x) { return x >= 2.0 ? 1.0 : 0.0; }) == 0.0);
  CHECK(ks_distance(c, [](double x) { return std::clamp(x - 5.0, 0.0, 1.0); }) == 1.0);
  CHECK_THROWS_AS(ks_distance(EmpiricalLaw{}, circular_cdf), EmptySample);

  // domain restriction drops the far tail
  EmpiricalLaw t;
  t.values = {0.5, 50.0};
  auto split = [](double x) { return 0.5 * std::min(x, 1.0) + (x >= 100.0 ? 0.5 : 0.0); };
  CHECK(ks_distance(t, split) == doctest::Approx(0.5));
  CHECK(ks_distance(t, split, 0.0, 10.0) == doctest::Approx(0.25));
}

TEST_CASE("tabulated and cumulative helpers") {
  const std::vector<double> x{0.0, 1.0, 2.0};
  const std::vector<double> F = cumulative_trapezoid(x, {1.0, 1.0, 1.0});
  CHECK(F.back() == 1.0);
  CHECK(F[1] == doctest::Approx(0.5));
  const auto cdf = tabulated_cdf(x, F);
  CHECK(cdf(-1.0) == 0.0);
  CHECK(cdf(0.5) == doctest::Approx(0.25));
  CHECK(cdf(3.0) == 1.0);
}

TEST_CASE("sample sizes and determinism") {
  const MCConfig cfg{64, 3, 5};
  const EmpiricalLaw e = sample_xmk_eigen(cfg, 1, 0);
  CHECK(e.values.size() == 64u * 3u);
  CHECK(std::is_sorted(e.values.begin(), e.values.end()));
  const EmpiricalLaw f = free_add_oracle(ScalarX0{{0.0, 0.0}}, Semicircle{1.0}, cfg);
  CHECK(f.values.size() == 2u * 64u * 3u);
  CHECK(f.kind == EmpiricalLaw::Kind::symmetrized_singular);

  const char* old = std::getenv("FRDIAG_THREADS");
  const std::string saved = old ? old : "";
  setenv("FRDIAG_THREADS", "1", 1);
  const EmpiricalLaw serial = sample_xmk_eigen(cfg, 1, 1);
  if (old) setenv("FRDIAG_THREADS", saved.c_str(), 1); else unsetenv("FRDIAG_THREADS");
  const EmpiricalLaw parallel = sample_xmk_eigen(cfg, 1, 1);
  CHECK(serial.values == parallel.values);
  CHECK(sample_xmk_eigen(MCConfig{64, 3, 6}, 1, 1).values != parallel.values);
  CHECK_THROWS_AS(sample_xmk_eigen(MCConfig{1, 3, 5}, 1, 0), DomainError);
}

TEST_CASE("circular law") {
  const EmpiricalLaw e = sample_xmk_eigen(MCConfig{256, 10, 1}, 1, 0);
  CHECK(ks_distance(e, circular_cdf) <= 0.05);
}

TEST_CASE("circular Cauchy law on r <= 10") {
  const EmpiricalLaw e = sample_xmk_eigen(MCConfig{256, 10, 2}, 1, 1);
  CHECK(ks_distance(e, [](double r) { return r * r / (1.0 + r * r); }, 0.0, 10.0) <= 0.08);
}

TEST_CASE("X_{2,1} radial law") {
  const EmpiricalLaw e = sample_xmk_eigen(MCConfig{256, 40, 3}, 2, 1);
  CHECK(ks_distance(e, [](double r) { return r > 0.0 ? radial_cdf_xmk(2, 1, r) : 0.0; }, 0.0, 10.0) <= 0.08);
}

TEST_CASE("KS shrinks with N") {
  double small = 0.0, large = 0.0;
  for (std::uint64_t g = 0; g < 5; ++g) {
    small += ks_distance(sample_xmk_eigen(MCConfig{128, 1, 100 + g}, 1, 0), circular_cdf);
    large += ks_distance(sample_xmk_eigen(MCConfig{512, 1, 200 + g}, 1, 0), circular_cdf);
  }
  CHECK(large < small);
}

TEST_CASE("eigenvalue arguments are uniform") {
  const auto z = sample_xmk_eigenvalues(MCConfig{256, 8, 4}, 1, 0);
  std::vector<int> bins(36, 0);
  for (const auto& v : z) {
    double a = std::arg(v);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    bins[std::min(35, int(a / (2.0 * std::numbers::pi) * 36.0))]++;
  }
  const double expect = double(z.size()) / 36.0;
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - expect) * (b - expect) / expect;
  // 99.9% quantile of chi-square with 35 degrees of freedom
  CHECK(chi2 < 66.6188);
}

TEST_CASE("free additive oracle") {
  const MCConfig cfg{256, 10, 7};
  const X0Spec bern = SelfAdjointX0{RealMeasure::from_atoms({{-1.0, 0.5}, {1.0, 0.5}})};
  const auto ref = convolved_cdf(Law::of(SymmetricMeasure::bernoulli(1.0)), Law::semicircle(1.0));
  CHECK(ks_distance(free_add_oracle(bern, Semicircle{1.0}, cfg), ref) < 0.05);
  CHECK(ks_distance(free_add_oracle(ScalarX0{{0.0, 0.0}}, Semicircle{1.0}, cfg), oracle::semicircle_cdf) < 0.04);
  CHECK(ks_distance(free_add_oracle(ScalarX0{{1.0, 0.0}}, Semicircle{1.0}, cfg), ref) < 0.05);
}

TEST_CASE("commutator, anticommutator and product") {
  const MCConfig cfg{256, 10, 8};
  const CommutatorResult minus = commutator_oracle(cfg, -1);
  CHECK(minus.ks < 0.06);
  CHECK(minus.ref_cdf.front() == 0.0);
  CHECK(minus.ref_cdf.back() == 1.0);
  CHECK(commutator_oracle(cfg, +1).ks < 0.06);
  CHECK(product_oracle(cfg).ks < 0.05);
  CHECK_THROWS_AS(commutator_oracle(cfg, 0), DomainError);
}

TEST_CASE("csv and metadata") {
  EmpiricalLaw s;
  s.values = {0.5, 1.0};
  CHECK(to_csv(s) == "value\n0.5\n1\n");
  const std::string meta = meta_json(MCConfig{8, 2, 3}, "xmk", {{"ks", 0.1}});
  CHECK(meta.find("\"seed\": 3") != std::string::npos);
  CHECK(meta.find("\"ks\"") != std::string::npos);
}
