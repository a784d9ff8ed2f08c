#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcc/grid.hpp"
#include "qcc/state.hpp"

using namespace qcc;

namespace {

PhaseField random_field(std::size_t nx, std::size_t np, unsigned seed) {
  PhaseField f(build_axis(-2.0, 2.0, nx), build_axis(-3.0, 3.0, np));
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : f.values) v = u(gen);
  return f;
}

}  // namespace

TEST_SUITE("core-grid") {
  TEST_CASE("build_axis spacing and errors") {
    CHECK(build_axis(-8, 8, 1024).spacing() == 0.015625);
    CHECK_THROWS_AS(build_axis(-8, 8, 1000), ConfigError);
    CHECK_THROWS_AS(build_axis(0, 1, 4), ConfigError);
    CHECK_THROWS_AS(build_axis(1, 1, 8), ConfigError);
    CHECK_THROWS_AS(build_axis(2, 1, 8), ConfigError);
  }

  TEST_CASE("frequency set of an 8-point unit axis") {
    const AxisGrid a = build_axis(0, 1, 8);
    const double w = 2.0 * std::numbers::pi;
    const double expected[] = {0, w, 2 * w, 3 * w, -4 * w, -3 * w, -2 * w, -w};
    for (std::size_t j = 0; j < 8; ++j) CHECK(a.frequency(j) == doctest::Approx(expected[j]).epsilon(1e-15));
    for (std::size_t j = 1; j < 8; ++j) CHECK(a.node(j) > a.node(j - 1));
    CHECK(a.nodes().size() == a.frequencies().size());
  }

  TEST_CASE("transform round trip and Parseval on random fields") {
    for (std::size_t n : {8u, 16u, 64u, 128u}) {
      PhaseField f = random_field(n, 2 * n, static_cast<unsigned>(n));
      for (Axis axis : {Axis::x, Axis::p}) {
        const SpectralField fwd = transform_along(f, axis, Direction::forward);
        const SpectralField back = transform_along(fwd, axis, Direction::inverse);
        double err = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i) err = std::max(err, std::abs(back.values[i] - f.values[i]));
        CHECK(err <= 1e-12);

        // Unnormalized forward: sum |F|^2 = len * sum |f|^2.
        double lhs = 0.0, rhs = 0.0;
        for (double v : f.values) lhs += v * v;
        for (const Complex& z : fwd.values) rhs += std::norm(z);
        const double len = static_cast<double>(axis == Axis::x ? f.nx() : f.np());
        CHECK(rhs / len == doctest::Approx(lhs).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("single harmonic lands in one bin, constant in the zero bin") {
    const AxisGrid x = build_axis(0, 1, 16);
    SpectralField s;
    s.rows = 16;
    s.cols = 8;
    s.values.resize(128);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 8; ++j) s.at(i, j) = std::polar(1.0, x.frequency(3) * x.node(i));
    const SpectralField f = transform_along(s, Axis::x, Direction::forward);
    for (std::size_t i = 0; i < 16; ++i) {
      const double mag = std::abs(f.at(i, 5));
      if (i == 3) CHECK(mag == doctest::Approx(16.0));
      else CHECK(mag < 1e-12);
    }
    PhaseField c(build_axis(0, 1, 8), build_axis(0, 1, 8));
    for (double& v : c.values) v = 2.5;
    const SpectralField fc = transform_along(c, Axis::p, Direction::forward);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(fc.at(i, j)) == doctest::Approx(j == 0 ? 20.0 : 0.0));
  }

  TEST_CASE("mismatched dimensions are rejected") {
    PhaseField f(build_axis(0, 1, 8), build_axis(0, 1, 8));
    f.values.pop_back();
    CHECK_THROWS_AS(transform_along(f, Axis::x, Direction::forward), NumericalError);
    CHECK_THROWS_AS(integrate_field(f), NumericalError);
  }

  TEST_CASE("integrate_field") {
    PhaseField f(build_axis(-1, 1, 16), build_axis(-1, 1, 16));
    CHECK(integrate_field(f) == 0.0);
    for (double& v : f.values) v = 1.0;
    CHECK(integrate_field(f) == doctest::Approx(4.0).epsilon(1e-15));
    const PhaseField g = gaussian_phase_field(GaussianInitialState::paper_instance(), build_axis(-8, 8, 1024),
                                              build_axis(-24, 24, 256));
    CHECK(std::abs(integrate_field(g) - 1.0) < 1e-10);
  }

  TEST_CASE("integrate_field is linear") {
    const PhaseField a = random_field(32, 32, 1);
    const PhaseField b = random_field(32, 32, 2);
    PhaseField c = a;
    for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] = 2.0 * a.values[i] - 3.0 * b.values[i];
    CHECK(integrate_field(c) == doctest::Approx(2.0 * integrate_field(a) - 3.0 * integrate_field(b)).epsilon(1e-12));
  }

  TEST_CASE("marginals") {
    GaussianInitialState s{0.3, -1.0, 0.04, 0.5, 0.0};
    const PhaseField g = gaussian_phase_field(s, build_axis(-2, 2, 128), build_axis(-6, 6, 128));
    const std::vector<double> mx = marginal(g, Axis::x);
    const double dx = g.x_axis.spacing();
    double var = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double d = g.x_axis.node(i) - 0.3;
      mass += mx[i] * dx;
      var += d * d * mx[i] * dx;
      CHECK(mx[i] == doctest::Approx(std::exp(-d * d / 0.08) / std::sqrt(2 * std::numbers::pi * 0.04)).epsilon(1e-9));
    }
    CHECK(var == doctest::Approx(0.04).epsilon(1e-9));

    const PhaseField r = random_field(64, 32, 7);
    for (Axis axis : {Axis::x, Axis::p}) {
      const std::vector<double> m = marginal(r, axis);
      const double h = axis == Axis::x ? r.x_axis.spacing() : r.p_axis.spacing();
      CHECK(compensated_sum(m) * h == doctest::Approx(integrate_field(r)).epsilon(1e-12));
    }

    PhaseField d(build_axis(0, 1, 8), build_axis(0, 1, 8));
    d.at(3, 5) = 1.0;
    const std::vector<double> md = marginal(d, Axis::p);
    for (std::size_t j = 0; j < 8; ++j) CHECK((md[j] != 0.0) == (j == 5));
  }

  TEST_CASE("boundary_mass") {
    const PhaseField g = gaussian_phase_field(GaussianInitialState{0, 0, 0.01, 0.01, 0}, build_axis(-2, 2, 64),
                                              build_axis(-2, 2, 64));
    CHECK(boundary_mass(g, 0.1) < 1e-10);
    PhaseField u(build_axis(0, 1, 64), build_axis(0, 1, 64));
    CHECK(boundary_mass(u, 0.1) == 0.0);
    for (double& v : u.values) v = 1.0;
    // Partial cells are weighted by area, so 1 - 0.8^2 holds off the cell lattice too.
    CHECK(boundary_mass(u, 0.1) == doctest::Approx(0.36).epsilon(1e-12));
    CHECK_THROWS_AS(boundary_mass(u, 0.5), ConfigError);
  }

  TEST_CASE("compensated_sum is exact on cancelling terms") {
    const std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
    CHECK(compensated_sum(v) == 2.0);
  }
}
