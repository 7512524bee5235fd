#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"

using namespace robin;
using namespace robin::test;

namespace {

SpectralData synth(int nc, int nr, const ClosedForm& target) {
  const Discretization gen(annulus(nc, nr));
  return synthesize_data(gen, RobinField::from_function(gen.mesh(), BoundaryTag::Gamma, target));
}

double fourier_amplitude(const SpectralData& d, int mode) {
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < d.theta.size(); ++i) {
    c += d.g[i] * std::cos(mode * d.theta[i]);
    s += d.g[i] * std::sin(mode * d.theta[i]);
  }
  return std::hypot(c, s) * 2.0 / static_cast<double>(d.theta.size());
}

}  // namespace

TEST_CASE("constant coefficient gives angle-independent data") {
  const Discretization gen(annulus(64, 16));
  const RobinField h = constant_h(gen.mesh(), 1.0);
  const SpectralData d = synthesize_data(gen, h);
  const auto [lo, hi] = std::minmax_element(d.g.begin(), d.g.end());
  CHECK((*hi - *lo) / std::abs(*lo) < 1e-2);
  CHECK(d.lambda == principal_eigenpair(gen, h).lambda);
  CHECK(d.theta.size() == 64);
  CHECK_FALSE(d.provenance.noisy);
}

TEST_CASE("the built-in target produces non-constant data with low Fourier modes") {
  const SpectralData d = synth(64, 16, paper4_target);
  const double mean = std::abs(fourier_amplitude(d, 0)) / 2.0;
  const auto [lo, hi] = std::minmax_element(d.g.begin(), d.g.end());
  CHECK((*hi - *lo) / mean > 1e-3);
  // h - 1 = sin(2t)/4 - sin(t)/20 - sin(3t)/20 on the unit circle
  for (int mode : {1, 2, 3}) CHECK(fourier_amplitude(d, mode) > 1e-5 * mean);
  CHECK(fourier_amplitude(d, 2) > fourier_amplitude(d, 7));
}

TEST_CASE("built-in target in polar form") {
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    const Point p{std::cos(t), std::sin(t)};
    const double polar = 1.0 + std::sin(2 * t) / 4 - std::sin(t) / 20 - std::sin(3 * t) / 20;
    CHECK(paper4_target(p) == doctest::Approx(polar).epsilon(1e-14));
  }
}

TEST_CASE("noise injection") {
  const SpectralData clean = synth(64, 16, paper4_target);

  SUBCASE("zero level leaves the data alone") {
    const SpectralData n = add_noise(clean, 0.0, 3);
    CHECK(n.g == clean.g);
    CHECK(n.lambda == clean.lambda);
    CHECK(n.provenance.eps_lambda == 0.0);
    CHECK(n.provenance.noisy);
  }
  SUBCASE("fixed seed is bitwise reproducible") {
    const SpectralData a = add_noise(clean, 0.02, 42);
    const SpectralData b = add_noise(clean, 0.02, 42);
    CHECK(a.g == b.g);
    CHECK(a.lambda == b.lambda);
    CHECK(add_noise(clean, 0.02, 43).g != a.g);
  }
  SUBCASE("eigenvalue noise equals the realized trace noise") {
    const SpectralData n = add_noise(clean, 0.02, 7);
    const double realized = realized_relative_noise(clean, n);
    CHECK(realized > 0.0);
    CHECK(realized < 0.02);
    CHECK(n.lambda / clean.lambda - 1.0 == doctest::Approx(realized).epsilon(1e-12));
    CHECK(n.provenance.eps_lambda == doctest::Approx(realized).epsilon(1e-14));
    CHECK(n.provenance.eps0 == 0.02);
    CHECK(n.provenance.seed == 7);
  }
  SUBCASE("realized level has the requested order") {
    for (double eps0 : {0.005, 0.01, 0.02}) {
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const double realized = realized_relative_noise(clean, add_noise(clean, eps0, seed));
        CHECK(realized > 0.2 * eps0);
        CHECK(realized < eps0);
      }
    }
  }
  SUBCASE("realized level is linear in eps0 for a fixed seed") {
    const double a = add_noise(clean, 0.01, 5).provenance.eps_lambda;
    const double b = add_noise(clean, 0.03, 5).provenance.eps_lambda;
    CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(add_noise(clean, -0.01, 1), ParameterError);
    CHECK_THROWS_AS(add_noise(add_noise(clean, 0.01, 1), 0.01, 1), InputError);
  }
}

TEST_CASE("periodic L2 norm of samples") {
  std::vector<double> theta;
  for (int k = 0; k < 256; ++k) theta.push_back(2 * kPi * k / 256);
  const std::vector<double> ones(theta.size(), 1.0);
  CHECK(periodic_l2_norm(theta, ones) == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-4));
  std::vector<double> c;
  for (double t : theta) c.push_back(std::cos(t));
  CHECK(periodic_l2_norm(theta, c) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-3));
}

TEST_CASE("transfer between meshes") {
  const Discretization gen(annulus(64, 16));
  const SpectralData d = synth(64, 16, paper4_target);

  SUBCASE("same mesh reproduces the nodal values") {
    const BoundaryField g = transfer_to_mesh(d, gen.mesh());
    const EigenPair eig = principal_eigenpair(gen, RobinField::from_function(gen.mesh(), BoundaryTag::Gamma, paper4_target));
    const BoundaryField trace = neumann_trace(gen, eig.u, eig.lambda,
                                              RobinField::from_function(gen.mesh(), BoundaryTag::Gamma, paper4_target));
    CHECK((g.values - trace.values).cwiseAbs().maxCoeff() <= 1e-15 * trace.values.cwiseAbs().maxCoeff());
  }
  SUBCASE("constant data stays constant") {
    SpectralData c = d;
    std::fill(c.g.begin(), c.g.end(), -0.75);
    for (int n : {16, 48, 200}) {
      const BoundaryField g = transfer_to_mesh(c, annulus(n, 4));
      CHECK(g.values.minCoeff() == doctest::Approx(-0.75).epsilon(1e-15));
      CHECK(g.values.maxCoeff() == doctest::Approx(-0.75).epsilon(1e-15));
    }
  }
  SUBCASE("linear ramp midpoint") {
    const std::vector<double> theta = {0.0, 1.0, 2.0, 4.0};
    const std::vector<double> v = {0.0, 3.0, 5.0, -1.0};
    CHECK(periodic_interpolate(theta, v, 0.5) == doctest::Approx(1.5));
    CHECK(periodic_interpolate(theta, v, 1.5) == doctest::Approx(4.0));
    CHECK(periodic_interpolate(theta, v, 2.0) == 5.0);
    // wrap from the last sample to the first one across 2 pi
    const double mid = 0.5 * (4.0 + 2 * kPi);
    CHECK(periodic_interpolate(theta, v, mid) == doctest::Approx(-0.5));
    CHECK(periodic_interpolate(theta, v, mid - 2 * kPi) == doctest::Approx(-0.5));
  }
  SUBCASE("empty samples") {
    SpectralData e;
    CHECK_THROWS_AS(transfer_to_mesh(e, gen.mesh()), InputError);
    CHECK_THROWS_AS(periodic_interpolate({}, {}, 0.0), InputError);
  }
}

TEST_CASE("generation and reconstruction meshes differ in the two-mesh protocol") {
  const TriMesh gen = annulus(128, 32);
  const TriMesh rec = annulus(96, 24);
  CHECK_FALSE(gen.same_as(rec));
  CHECK(gen.same_as(annulus(128, 32)));
}

TEST_CASE("spectral data file round trip") {
  const SpectralData clean = synth(32, 8, paper4_target);
  SpectralData noisy = add_noise(clean, 0.02, 7);
  noisy.target = "paper4";
  std::stringstream ss;
  write_spectral_data(noisy, ss);
  const std::string text = ss.str();
  CHECK(text.rfind("# lambda ", 0) == 0);
  CHECK(text.find("# provenance noisy eps0=0.02 seed=7 eps_lambda=") != std::string::npos);
  CHECK(text.find("# rng mt19937_64\n") != std::string::npos);
  CHECK(text.find("\ntheta,g\n") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);

  const SpectralData back = read_spectral_data(ss);
  CHECK(back.lambda == noisy.lambda);
  CHECK(back.theta == noisy.theta);
  CHECK(back.g == noisy.g);
  CHECK(back.provenance.noisy);
  CHECK(back.provenance.eps0 == 0.02);
  CHECK(back.provenance.seed == 7);
  CHECK(back.provenance.eps_lambda == noisy.provenance.eps_lambda);
  CHECK(back.target == "paper4");

  std::stringstream cs;
  write_spectral_data(clean, cs);
  CHECK(cs.str().find("# provenance clean\n") != std::string::npos);
  CHECK_FALSE(read_spectral_data(cs).provenance.noisy);
}

TEST_CASE("malformed spectral data files") {
  SUBCASE("missing lambda") {
    std::istringstream in("# provenance clean\ntheta,g\n0,1\n1,1\n2,1\n");
    CHECK_THROWS(read_spectral_data(in));
  }
  SUBCASE("bad number names the line") {
    std::istringstream in("# lambda 4.5\n# provenance clean\ntheta,g\n0,1\n1,x\n2,1\n");
    try {
      read_spectral_data(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("angles out of order") {
    std::istringstream in("# lambda 4.5\n# provenance clean\ntheta,g\n0,1\n2,1\n1,1\n");
    CHECK_THROWS_AS(read_spectral_data(in), InputError);
  }
  SUBCASE("too few samples") {
    std::istringstream in("# lambda 4.5\n# provenance clean\ntheta,g\n0,1\n2,1\n");
    CHECK_THROWS_AS(read_spectral_data(in), InputError);
  }
}

TEST_CASE("angular CSV files") {
  const auto path = std::filesystem::temp_directory_path() / "robin_angular_test.csv";
  save_angular_csv(path, "h", {0.0, 1.0, 2.0}, {1.0, 1.5, 0.25});
  const AngularSamples s = load_angular_csv(path);
  CHECK(s.theta == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(s.values == std::vector<double>{1.0, 1.5, 0.25});
  std::filesystem::remove(path);
  CHECK_THROWS(load_angular_csv(path));
}
