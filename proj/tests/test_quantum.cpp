#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcc/analysis.hpp"
#include "qcc/quantum.hpp"

using namespace qcc;

namespace {

// Closed-form Wigner function of N [g(x - a) + g(x + a)] with g a real
// Gaussian of position variance s2.
double cat_wigner(double x, double p, double a, double s2, double hbar) {
  const auto wg = [&](double y) {
    return std::exp(-y * y / (2 * s2) - 2 * s2 * p * p / (hbar * hbar)) / (std::numbers::pi * hbar);
  };
  const double n2 = 1.0 / (2.0 * (1.0 + std::exp(-a * a / (2 * s2))));
  return n2 * (wg(x - a) + wg(x + a) + 2.0 * wg(x) * std::cos(2.0 * p * a / hbar));
}

ComplexField cat_state(const AxisGrid& axis, double a, double s2) {
  ComplexField psi(axis);
  for (std::size_t j = 0; j < axis.count(); ++j) {
    const double x = axis.node(j);
    psi.values[j] = std::exp(-(x - a) * (x - a) / (4 * s2)) + std::exp(-(x + a) * (x + a) / (4 * s2));
  }
  const double n = psi.norm();
  for (auto& v : psi.values) v /= std::sqrt(n);
  return psi;
}

}  // namespace

TEST_SUITE("quantum-evolve") {
  const DrivenDoubleWell well = DrivenDoubleWell::paper_regime();

  TEST_CASE("reference packet: norm and position") {
    const ComplexField psi = gaussian_packet(GaussianInitialState::paper_instance(), build_axis(-8, 8, 1024), 0.1);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
    const MomentRecord m = compute_moments(psi, well, 0.1, 0.0);
    CHECK(std::abs(m.mean_x + 3.0) < 1e-8);
    CHECK(m.mean_p == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(m.central_x2 == doctest::Approx(0.0025).epsilon(1e-8));
    CHECK(m.central_p2 == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("packet preconditions") {
    const AxisGrid axis = build_axis(-8, 8, 1024);
    CHECK_THROWS_AS(gaussian_packet(GaussianInitialState{-3, 8, 0.0025, 2.0, 0}, axis, 0.1), ConfigError);
    CHECK_THROWS_AS(gaussian_packet(GaussianInitialState{-3, 8, 0.0025, 1.0, 0.01}, axis, 0.1), ConfigError);
    CHECK_THROWS_AS(gaussian_packet(GaussianInitialState{7.95, 0, 0.0025, 1.0, 0}, axis, 0.1), ConfigError);
    const ComplexField c = gaussian_packet(GaussianInitialState{0, 0, 0.0025, 1.0, 0}, axis, 0.1);
    CHECK(std::abs(compute_moments(c, well, 0.1, 0.0).mean_p) < 1e-10);
  }

  TEST_CASE("harmonic coherent state follows the classical orbit") {
    const HarmonicOracle h(1.0, 4.0);
    const double hbar = 0.1, w = h.angular_frequency();
    const GaussianInitialState s{1.0, 1.0, hbar / (2 * w), hbar * w / 2, 0.0};
    ComplexField psi = gaussian_packet(s, build_axis(-6, 6, 256), hbar);
    // The Strang phase error at T/2048 is about 2e-6, so halve the step.
    const EvolverSettings set = EvolverSettings::from_period(h.period(), 4096, hbar, 0.0);
    SchrodingerEvolver ev(psi.axis, h, set);
    double worst = 0.0;
    for (int k = 1; k <= 4096; ++k) {
      ev.step(psi);
      const double t = k * set.dt;
      const double expect = s.x0 * std::cos(w * t) + s.p0 / w * std::sin(w * t);
      worst = std::max(worst, std::abs(compute_moments(psi, h, hbar, t).mean_x - expect));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("free packet: momentum density is invariant and width spreads") {
    const FreeParticle free(1.0);
    const double hbar = 0.1;
    const GaussianInitialState s{0.0, 1.0, 0.01, 0.25, 0.0};
    ComplexField psi = gaussian_packet(s, build_axis(-16, 16, 1024), hbar);
    const EvolverSettings set = EvolverSettings::from_period(1.0, 256, hbar, 0.0);
    SchrodingerEvolver ev(psi.axis, free, set);
    const MomentRecord m0 = compute_moments(psi, free, hbar, 0.0);
    ev.advance(psi, 512);
    const double t = 512 * set.dt;
    const MomentRecord m = compute_moments(psi, free, hbar, t);
    CHECK(m.central_p2 == doctest::Approx(m0.central_p2).epsilon(1e-10));
    CHECK(m.mean_p == doctest::Approx(m0.mean_p).epsilon(1e-10));
    CHECK(m.central_x2 == doctest::Approx(s.var_x + s.var_p * t * t).epsilon(1e-9));
  }

  TEST_CASE("norm drift over 1e4 steps") {
    ComplexField psi = gaussian_packet(GaussianInitialState::paper_instance(), build_axis(-8, 8, 512), 0.1);
    const EvolverSettings set = EvolverSettings::from_period(well.period(), 2048, 0.1, 0.0);
    SchrodingerEvolver ev(psi.axis, well, set);
    ev.advance(psi, 10000);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
  }

  TEST_CASE("single step helper matches the evolver") {
    ComplexField psi = gaussian_packet(GaussianInitialState::paper_instance(), build_axis(-8, 8, 256), 0.1);
    const EvolverSettings set = EvolverSettings::from_period(well.period(), 2048, 0.1, 0.0);
    const ComplexField one = schrodinger_step(psi, well, set, 0.0);
    SchrodingerEvolver ev(psi.axis, well, set);
    ev.step(psi);
    for (std::size_t j = 0; j < psi.values.size(); ++j) CHECK(std::abs(psi.values[j] - one.values[j]) < 1e-15);
  }

  TEST_CASE("Wigner transform of a minimum-uncertainty Gaussian") {
    const GaussianInitialState s{0.5, -2.0, 0.01, 0.25, 0.0};
    const ComplexField psi = gaussian_packet(s, build_axis(-4, 4, 256), 0.1);
    double residue = 1.0;
    const PhaseField w = wigner_transform(psi, build_axis(-8, 8, 256), 0.1, &residue);
    const PhaseField g = gaussian_phase_field(s, w.x_axis, w.p_axis);
    double err = 0.0, lowest = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      err = std::max(err, std::abs(w.values[i] - g.values[i]));
      lowest = std::min(lowest, w.values[i]);
    }
    CHECK(residue < 1e-10);
    CHECK(err < 1e-10);
    CHECK(lowest > -1e-12);
  }

  TEST_CASE("cat state fringes match the closed form") {
    const double a = 1.0, s2 = 0.02, hbar = 0.1;
    const ComplexField psi = cat_state(build_axis(-4, 4, 512), a, s2);
    double residue = 1.0;
    const PhaseField w = wigner_transform(psi, build_axis(-8, 8, 256), hbar, &residue);
    CHECK(residue < 1e-10);
    double err = 0.0;
    for (std::size_t ix = 0; ix < w.nx(); ++ix)
      for (std::size_t ip = 0; ip < w.np(); ++ip)
        err = std::max(err, std::abs(w.at(ix, ip) - cat_wigner(w.x_axis.node(ix), w.p_axis.node(ip), a, s2, hbar)));
    CHECK(err < 1e-9);
    CHECK(std::abs(integrate_field(w) - 1.0) < 1e-8);
    // Fringe period along p at the midpoint is 2 pi hbar / d with d = 2a.
    const std::size_t mid = w.nx() / 2;
    REQUIRE(w.x_axis.node(mid) == 0.0);
    const double period = 2 * std::numbers::pi * hbar / (2 * a);
    const std::size_t shift = static_cast<std::size_t>(std::lround(period / w.p_axis.spacing()));
    REQUIRE(std::abs(shift * w.p_axis.spacing() - period) < 0.2 * w.p_axis.spacing());
    CHECK(w.at(mid, w.np() / 2) > 0.0);
    CHECK(w.at(mid, w.np() / 2 + shift / 2) < 0.0);
  }

  TEST_CASE("Wigner transform of random normalized states integrates to one") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const AxisGrid axis = build_axis(-6, 6, 256);
    for (int trial = 0; trial < 4; ++trial) {
      ComplexField psi(axis);
      for (int k = 0; k < 5; ++k) {
        const double c = 2.0 * u(gen), p = 3.0 * u(gen), ph = 3.0 * u(gen);
        for (std::size_t j = 0; j < axis.count(); ++j) {
          const double x = axis.node(j);
          psi.values[j] += std::polar(std::exp(-(x - c) * (x - c) / 0.2), p * x / 0.1 + ph);
        }
      }
      const double n = psi.norm();
      for (auto& v : psi.values) v /= std::sqrt(n);
      double residue = 1.0;
      const PhaseField w = wigner_transform(psi, build_axis(-10, 10, 256), 0.1, &residue);
      CHECK(std::abs(integrate_field(w) - 1.0) < 1e-8);
      CHECK(residue < 1e-10);
      // The x marginal of f_W is |psi|^2.
      const std::vector<double> mx = marginal(w, Axis::x);
      double err = 0.0;
      for (std::size_t j = 0; j < axis.count(); ++j) err = std::max(err, std::abs(mx[j] - std::norm(psi.values[j])));
      CHECK(err < 1e-9);
    }
  }

  TEST_CASE("momentum content outside the p box is rejected") {
    const ComplexField psi = gaussian_packet(GaussianInitialState{0, 10, 0.0025, 1, 0}, build_axis(-8, 8, 1024), 0.1);
    CHECK_THROWS_AS(wigner_transform(psi, build_axis(-4, 4, 256), 0.1), ConfigError);
  }

  TEST_CASE("position boundary mass") {
    const ComplexField psi = gaussian_packet(GaussianInitialState{0, 0, 0.01, 0.25, 0}, build_axis(-4, 4, 256), 0.1);
    CHECK(position_boundary_mass(psi, 0.05) < 1e-12);
    ComplexField edge(build_axis(-4, 4, 256));
    for (std::size_t j = 0; j < 256; ++j) edge.values[j] = 1.0 / std::sqrt(8.0);
    CHECK(position_boundary_mass(edge, 0.05) == doctest::Approx(0.1).epsilon(1e-12));
  }
}
