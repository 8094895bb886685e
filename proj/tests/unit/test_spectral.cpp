#include <doctest.h>

#include "fnls/nonlinearity.hpp"
#include "fnls/random.hpp"
#include "fnls/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace fnls;

namespace {

ComplexField smooth_random(const GridSpec& grid, std::uint64_t seed) {
  Stream rng(seed, {0});
  std::vector<cplx> c(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    c[k] = std::pow(1.0 + grid.xi_squared(k), -1.5) * cplx(rng.normal(), rng.normal());
  }
  return from_spectrum(grid, c);
}

}  // namespace

TEST_CASE("grid validation and frequencies") {
  CHECK_THROWS_AS(GridSpec(3, 16, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1, 12, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1, 16, 0.0), std::invalid_argument);
  const GridSpec g(1, 16, std::numbers::pi);
  CHECK(g.frequency(1) == doctest::Approx(1.0));
  CHECK(g.frequency(15) == doctest::Approx(-1.0));
  CHECK(g.frequency(8) == doctest::Approx(-8.0));
  CHECK(g.coordinate(0, 0) == doctest::Approx(-std::numbers::pi));
  const GridSpec g2(2, 8, 1.0);
  CHECK(g2.size() == 64);
  CHECK(g2.volume() == doctest::Approx(4.0));
  CHECK(g2.xi_squared(8 * 1 + 1) == doctest::Approx(2.0 * std::pow(std::numbers::pi, 2)));
}

TEST_CASE("Sobolev norms") {
  const GridSpec g(1, 32, std::numbers::pi);
  CHECK(sobolev_norm(ComplexField(g), 1.0) == 0.0);
  // a single orthonormal mode has norm (1+|xi|^2)^{s/2}
  const ComplexField e = fourier_mode(g, 3);
  CHECK(sobolev_norm(e, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(sobolev_norm(e, 1.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-13));
  CHECK(sobolev_norm(e, 2.5) == doctest::Approx(std::pow(10.0, 1.25)).epsilon(1e-13));
  // s = 0 is the physical-space L^2 norm
  const ComplexField u = smooth_random(g, 1);
  double phys = 0.0;
  for (const auto& z : u.values) phys += std::norm(z);
  phys *= g.cell_measure();
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(std::sqrt(phys)).epsilon(1e-13));
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
  CHECK(mass(u) == doctest::Approx(phys).epsilon(1e-13));
}

TEST_CASE("real inner product") {
  const GridSpec g(2, 16, 2.0);
  const ComplexField u = smooth_random(g, 4);
  ComplexField iu(g);
  for (int j = 0; j < g.size(); ++j) iu.values[j] = cplx(0.0, 1.0) * u.values[j];
  CHECK(l2_inner(u, u) == doctest::Approx(mass(u)).epsilon(1e-13));
  CHECK(std::abs(l2_inner(u, iu)) < 1e-12 * mass(u));
  CHECK(std::abs(l2_inner(fourier_mode(g, 3), fourier_mode(g, 17))) < 1e-14);
  CHECK_THROWS_AS(l2_inner(u, ComplexField(GridSpec(2, 8, 2.0))), std::invalid_argument);
}

TEST_CASE("Schroedinger group") {
  const GridSpec g(1, 64, std::numbers::pi);
  const ComplexField u = smooth_random(g, 2);
  SUBCASE("identity at t = 0") {
    const ComplexField v = apply_group(u, 0.0);
    for (int j = 0; j < g.size(); ++j) CHECK(std::abs(v.values[j] - u.values[j]) < 1e-14);
  }
  SUBCASE("isometry on every Sobolev space") {
    ComplexField v = u;
    for (int i = 0; i < 50; ++i) {
      const ComplexField w = apply_group(v, 0.37 * (i + 1));
      for (double s : {0.0, 1.0, 2.4}) {
        CHECK(std::abs(sobolev_norm(w, s) / sobolev_norm(v, s) - 1.0) < 1e-12);
      }
      v = w;
    }
  }
  SUBCASE("group law") {
    const ComplexField a = apply_group(apply_group(u, 0.3), 0.5);
    const ComplexField b = apply_group(u, 0.8);
    for (int j = 0; j < g.size(); ++j) CHECK(std::abs(a.values[j] - b.values[j]) < 1e-13);
  }
  SUBCASE("multiplier on a single mode") {
    const ComplexField e = fourier_mode(g, 1);
    const ComplexField v = apply_group(e, std::numbers::pi);
    for (int j = 0; j < g.size(); ++j) CHECK(std::abs(v.values[j] + e.values[j]) < 1e-13);
  }
}

TEST_CASE("group deviation bound") {
  const GridSpec g(1, 64, std::numbers::pi);
  CHECK(group_deviation_norm(g, 0.3, 0.0) == 0.0);
  CHECK(group_deviation_norm(g, 0.0, 5.0) <= 2.0);
  for (int i = 0; i < 20; ++i) {
    const double gamma = 0.95 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double t = std::pow(10.0, -3.0 + 4.0 * j / 19.0);
      CHECK(group_deviation_norm(g, gamma, t) <= std::pow(2.0, 1.0 - gamma) * std::pow(t, gamma));
    }
  }
  CHECK_THROWS_AS(group_deviation_norm(g, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("mass and energy of simple fields") {
  const GridSpec g(1, 32, 2.0);
  const ComplexField zero(g);
  CHECK(mass(zero) == 0.0);
  CHECK(hamiltonian(zero, NonlinearitySpec::kerr(1.0, 1.0)) == 0.0);
  ComplexField c(g);
  for (auto& z : c.values) z = 2.0;
  CHECK(mass(c) == doctest::Approx(16.0));
  CHECK(gradient_norm_squared(c) == doctest::Approx(0.0).epsilon(1e-12));
  // no gradient, so H = -\int F(|u|^2) with F(rho) = lambda rho^{sigma+1} / (2(sigma+1))
  CHECK(hamiltonian(c, NonlinearitySpec::kerr(1.0, 1.0)) == doctest::Approx(-16.0));
  CHECK(hamiltonian(c, NonlinearitySpec::kerr(-1.0, 1.0)) == doctest::Approx(16.0));
  // plane wave: ||grad||^2 = xi^2 mass
  const ComplexField w = ComplexField::from_function(g, [](double x, double) { return std::polar(1.0, std::numbers::pi * x); });
  CHECK(gradient_norm_squared(w) == doctest::Approx(std::pow(std::numbers::pi, 2) * 4.0));
}

TEST_CASE("nonlinearity") {
  const GridSpec g(1, 16, 1.0);
  CHECK(mass(evaluate_nonlinearity(NonlinearitySpec::kerr(1.0, 1.0), ComplexField(g))) == 0.0);
  ComplexField one(g);
  for (auto& z : one.values) z = 1.0;
  const ComplexField f = evaluate_nonlinearity(NonlinearitySpec::kerr(1.0, 1.0), one);
  for (const auto& z : f.values) CHECK(z == cplx(1.0, 0.0));
  // saturated -> Kerr as kappa -> 0
  const auto kerr = NonlinearitySpec::kerr(1.0, 1.5);
  // the gap is about kappa rho^{2 sigma} r
  const auto sat = NonlinearitySpec::saturated(1.0, 1.5, 1e-9);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = 2.0 * i / 100.0;
    worst = std::max(worst, std::abs(kerr.rate(r * r) * r - sat.rate(r * r) * r));
  }
  CHECK(worst < 1e-5);
  CHECK_THROWS_AS(NonlinearitySpec::kerr(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::saturated(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK(parse_nonlinearity_kind(to_string(NonlinearitySpec::Kind::saturated)) == NonlinearitySpec::Kind::saturated);
  // the potential is the antiderivative: F'(rho) = g(rho) / 2
  const double rho = 0.7;
  const double h = 1e-6;
  CHECK((sat.potential(rho + h) - sat.potential(rho - h)) / (2 * h) == doctest::Approx(0.5 * sat.rate(rho)).epsilon(1e-7));
}
