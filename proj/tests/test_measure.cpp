#include <doctest.h>

#include <cmath>
#include <numbers>

#include "frdiag/errors.hpp"
#include "frdiag/io.hpp"
#include "frdiag/measure.hpp"
#include "frdiag/models.hpp"
#include "oracles.hpp"

using namespace frdiag;

namespace {

PositiveMeasure atom_sequence() {
  return PositiveMeasure::from_atom_sequence(
      [](int n) { return Atom{std::exp(std::ldexp(1.0, n)), std::ldexp(1.0, -n)}; }, 8);
}

}  // namespace

TEST_CASE("moment_p") {
  const PositiveMeasure mp = marchenko_pastur1();
  CHECK(moment_p(mp, 1.0).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(moment_p(PositiveMeasure::dirac(1.0), -2.0).value == doctest::Approx(1.0));
  CHECK_FALSE(moment_p(mp, -1.0).is_finite());
  // second moment of MP(1) is 2
  CHECK(moment_p(mp, 2.0).value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_FALSE(moment_p(PositiveMeasure::from_atoms(0.5, {{1.0, 0.5}}), -1.0).is_finite());
}

TEST_CASE("moment_p is monotone under the stochastic order") {
  for (double p : {0.5, 1.0, 3.0}) {
    CHECK(moment_p(PositiveMeasure::dirac(1.0), p).value < moment_p(PositiveMeasure::dirac(2.0), p).value);
  }
}

TEST_CASE("symmetrize") {
  const SymmetricMeasure b = symmetrize(PositiveMeasure::dirac(1.0));
  CHECK(b.cdf(-1.0) == doctest::Approx(0.5));
  CHECK(b.cdf(-1.0 - 1e-9) == doctest::Approx(0.0));
  CHECK(b.cdf(1.0) == doctest::Approx(1.0));
  CHECK(b.integrate([](double x) { return x * x * x; }) == 0.0);

  const SymmetricMeasure d0 = symmetrize(PositiveMeasure());
  CHECK(d0.mass_at_zero() == 1.0);
  CHECK(d0.is_point_mass());

  // |c| is quarter-circle distributed, so sqrt of Pi_1 symmetrizes to the semicircle
  const SymmetricMeasure sc = symmetrize(sqrt_pushforward(marchenko_pastur1()));
  CHECK(sc.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  double err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -2.2 + 4.4 * i / 999.0;
    err = std::max(err, std::abs(sc.cdf(x) - oracle::semicircle_cdf(x)));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("even moments survive symmetrization") {
  const PositiveMeasure mu = quarter_circle(1.0);
  const SymmetricMeasure s = symmetrize(mu);
  for (int p : {2, 4, 6}) {
    CHECK(s.integrate([p](double x) { return std::pow(x, p); }) == doctest::Approx(moment_p(mu, p).value).epsilon(1e-14));
  }
}

TEST_CASE("square and sqrt pushforwards") {
  const PositiveMeasure d4 = square_pushforward(PositiveMeasure::dirac(2.0));
  REQUIRE(d4.point_location().has_value());
  CHECK(*d4.point_location() == 4.0);

  const PositiveMeasure qc = quarter_circle(1.0);
  const PositiveMeasure back = sqrt_pushforward(square_pushforward(qc));
  REQUIRE(back.nodes().size() == qc.nodes().size());
  for (std::size_t i = 0; i < qc.nodes().size(); ++i) {
    CHECK(back.nodes()[i].x == doctest::Approx(qc.nodes()[i].x).epsilon(1e-15));
    CHECK(back.nodes()[i].density * back.nodes()[i].weight ==
          doctest::Approx(qc.nodes()[i].density * qc.nodes()[i].weight).epsilon(1e-14));
  }

  const PositiveMeasure sq = square_pushforward(qc);
  CHECK(sq.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  // Pi_1 CDF in closed form through x = 4 sin^2(theta)
  double err = 0.0;
  for (double x : {0.01, 0.3, 1.0, 2.0, 3.5, 3.99}) {
    const double th = std::asin(std::sqrt(x / 4.0));
    err = std::max(err, std::abs(sq.cdf(x) - (2.0 * th + std::sin(2.0 * th)) / std::numbers::pi));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("mass conservation") {
  const PositiveMeasure mp = marchenko_pastur1();
  CHECK(sqrt_pushforward(mp).total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(square_pushforward(mp).total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(symmetrize(mp).total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  const PositiveMeasure mixed = PositiveMeasure::from_density(
      [](double) { return 0.5; }, {1.0, 2.0, 1.0}, 0.25, {{3.0, 0.25}});
  CHECK(mixed.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(square_pushforward(mixed).total_mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("log_plus_integral") {
  CHECK(log_plus_integral(PositiveMeasure::dirac(1.0)).value == 0.0);
  CHECK(log_plus_integral(PositiveMeasure::dirac(std::exp(1.0))).value == doctest::Approx(1.0));
  // 3 / (x log^4 x) on [e, inf): log+ integral is 3 int dx / (x log^3 x) = 3/2
  const PositiveMeasure tail = PositiveMeasure::from_density(
      [](double x) { return 3.0 / (x * std::pow(std::log(x), 4)); }, {std::exp(1.0), INFINITY, 10.0});
  const ExtendedReal v = log_plus_integral(tail);
  REQUIRE(v.is_finite());
  CHECK(v.value == doctest::Approx(1.5).epsilon(1e-3));
  // atoms 2^-n at exp(2^n): partial sums grow by one per term
  CHECK_FALSE(log_plus_integral(atom_sequence()).is_finite());
}

TEST_CASE("json round trip") {
  const PositiveMeasure mu = PositiveMeasure::from_density([](double x) { return 0.5 * x; }, {0.0, 2.0, 1.0}, 0.0, {},
                                                           GridOptions{4});
  const PositiveMeasure back = io::measure_from_json(io::to_json(mu));
  REQUIRE(back.nodes().size() == mu.nodes().size());
  for (std::size_t i = 0; i < mu.nodes().size(); ++i) {
    CHECK(back.nodes()[i].x == mu.nodes()[i].x);
    CHECK(back.nodes()[i].weight == mu.nodes()[i].weight);
  }
}

TEST_CASE("invalid construction") {
  CHECK_THROWS_AS(PositiveMeasure::from_atoms(0.5, {{1.0, 0.2}}), DomainError);
  CHECK_THROWS_AS(PositiveMeasure::from_atoms(0.0, {{1.0, 0.5}, {1.0, 0.5}}), DomainError);
}
