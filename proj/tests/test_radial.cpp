#include <doctest.h>

#include "support.hpp"

using namespace robin;
using namespace robin::test;

TEST_CASE("Dirichlet limit matches the Bessel cross-product root") {
  const double bessel = dirichlet_annulus_eigenvalue(1.0, 2.0);
  const double stiff = radial_principal(1e8, 1.0, 2.0, 2000).lambda;
  CHECK(rel(stiff, bessel) < 1e-6);
  // first root of J0(k) Y0(2k) - J0(2k) Y0(k) is k = 3.1230...
  CHECK(std::sqrt(bessel) == doctest::Approx(3.123).epsilon(1e-3));
}

TEST_CASE("Bessel series at known points") {
  CHECK(bessel_j0_series(0.0) == 1.0);
  CHECK(bessel_j0_series(2.404825557695773) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bessel_j0_series(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-14));
  CHECK(bessel_y0_series(1.0) == doctest::Approx(0.08825696421567696).epsilon(1e-13));
  CHECK(bessel_y0_series(0.8935769662791675) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("oracle eigenvalue is monotone in h") {
  const double a = radial_principal(1.0, 1.0, 2.0, 1000).lambda;
  const double b = radial_principal(10.0, 1.0, 2.0, 1000).lambda;
  const double c = radial_principal(1e8, 1.0, 2.0, 1000).lambda;
  CHECK(a < b);
  CHECK(b < c);
}

TEST_CASE("extrapolated oracle is grid independent") {
  const double a = radial_principal(1.0, 1.0, 2.0, 2000).lambda;
  const double b = radial_principal(1.0, 1.0, 2.0, 4000).lambda;
  CHECK(rel(a, b) < 1e-8);
}

TEST_CASE("oracle eigenfunction") {
  const double h = 1.0;
  const RadialSolution s = radial_principal(h, 1.0, 2.0, 2000);
  const auto& r = s.r_samples;
  const auto& u = s.u_samples;
  REQUIRE(r.size() == u.size());
  CHECK(r.front() == 1.0);
  CHECK(r.back() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u.back() == 0.0);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) CHECK(u[i] > 0.0);

  // 2 pi \int r u^2 dr = 1
  double norm = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    norm += 0.5 * (r[i + 1] - r[i]) * (r[i] * u[i] * u[i] + r[i + 1] * u[i + 1] * u[i + 1]);
  }
  CHECK(2 * kPi * norm == doctest::Approx(1.0).epsilon(1e-12));

  // Robin condition h u - u' = 0 at r_inner, one-sided second-order derivative
  const double dr = r[1] - r[0];
  const double du = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dr);
  CHECK(std::abs(h * u[0] - du) < 1e-4 * std::abs(du));

  CHECK(s.du_at_outer < 0.0);
  CHECK(rel(s.lambda_fine, s.lambda_coarse) < 1e-6);
  CHECK(rel(s.lambda, s.lambda_fine) < rel(s.lambda, s.lambda_coarse));
}

TEST_CASE("oracle parameter checks") {
  CHECK_THROWS_AS(radial_principal(1.0, 1.0, 2.0, 999), ParameterError);
  CHECK_THROWS_AS(radial_principal(0.0, 1.0, 2.0, 1000), ParameterError);
  CHECK_THROWS_AS(radial_principal(1.0, 2.0, 1.0, 1000), ParameterError);
  CHECK_THROWS_AS(dirichlet_annulus_eigenvalue(2.0, 1.0), ParameterError);
}
