#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qcc/analysis.hpp"
#include "qcc/classical.hpp"
#include "qcc/rng.hpp"

using namespace qcc;

namespace {

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

ParticleEnsemble single(double x, double p) {
  ParticleEnsemble e = sample_gaussian_ensemble(GaussianInitialState{x, p, 1.0, 1.0, 0.0}, 2, 1);
  e.x.assign(1, x);
  e.p.assign(1, p);
  e.tangent_x.assign(1, 1.0);
  e.tangent_p.assign(1, 0.0);
  e.log_stretch.assign(1, 0.0);
  e.stream_ids.resize(1);
  return e;
}

}  // namespace

TEST_SUITE("classical-evolve") {
  const DrivenDoubleWell well = DrivenDoubleWell::paper_regime();

  TEST_CASE("Gaussian ensemble sampling") {
    const ParticleEnsemble e = sample_gaussian_ensemble(GaussianInitialState::paper_instance(), 100000, 7);
    CHECK(e.size() == 100000);
    CHECK(std::abs(sample_mean(e.p) - 8.0) < 4.0 / std::sqrt(1e5));
    CHECK(std::abs(sample_mean(e.x) + 3.0) < 4.0 * std::sqrt(0.0025 / 1e5));
    CHECK(sample_var(e.x) == doctest::Approx(0.0025).epsilon(0.02));
    CHECK(sample_var(e.p) == doctest::Approx(1.0).epsilon(0.02));
    CHECK_FALSE(e.mean_outlier);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(e.tangent_x[i] == 1.0);
      CHECK(e.tangent_p[i] == 0.0);
    }
    CHECK_THROWS_AS(sample_gaussian_ensemble(GaussianInitialState::paper_instance(), 1, 7), ConfigError);
    CHECK_THROWS_AS(sample_gaussian_ensemble(GaussianInitialState{0, 0, -1, 1, 0}, 10, 7), ConfigError);
  }

  TEST_CASE("correlated sampling reproduces the covariance") {
    const GaussianInitialState s{0.0, 0.0, 0.5, 2.0, 0.6};
    const ParticleEnsemble e = sample_gaussian_ensemble(s, 200000, 3);
    const MomentRecord m = compute_moments(e, FreeParticle(1.0), 0.0);
    CHECK(m.cross_xp == doctest::Approx(0.6).epsilon(0.03));
  }

  TEST_CASE("same seed, same samples") {
    const ParticleEnsemble a = sample_gaussian_ensemble(GaussianInitialState::paper_instance(), 1000, 99);
    const ParticleEnsemble b = sample_gaussian_ensemble(GaussianInitialState::paper_instance(), 1000, 99);
    const ParticleEnsemble c = sample_gaussian_ensemble(GaussianInitialState::paper_instance(), 1000, 100);
    CHECK(a.x == b.x);
    CHECK(a.p == b.p);
    CHECK(a.x != c.x);
  }

  TEST_CASE("Langevin noise depends only on (seed, particle, step)") {
    ParticleEnsemble a = sample_gaussian_ensemble(GaussianInitialState{0, 0, 1, 1, 0}, 100, 5);
    ParticleEnsemble b = a;
    const FreeParticle free(1.0);
    for (int k = 0; k < 10; ++k) langevin_step(a, free, 0.025, 0.01, k * 0.01);
    // Same steps applied to a reordered ensemble give the same particles.
    std::reverse(b.x.begin(), b.x.end());
    std::reverse(b.p.begin(), b.p.end());
    std::reverse(b.stream_ids.begin(), b.stream_ids.end());
    for (int k = 0; k < 10; ++k) langevin_step(b, free, 0.025, 0.01, k * 0.01);
    for (std::size_t i = 0; i < 100; ++i) CHECK(a.p[i] == b.p[99 - i]);
    CHECK(a.step_index == 10);
    CHECK(a.time == doctest::Approx(0.1));
  }

  TEST_CASE("symplectic energy behaviour on the undriven well") {
    const DrivenDoubleWell undriven(1.0, 0.5, 10.0, 0.0, 6.07);
    ParticleEnsemble e = single(-3.0, 8.0);
    const auto energy = [&] { return 0.5 * e.p[0] * e.p[0] + undriven.value(e.x[0], 0.0); };
    const double e0 = energy();
    const double dt = 1e-3;
    // Window means over two orbits separate the secular drift from the
    // bounded O(dt^2) oscillation of the Verlet energy.
    double first = 0.0, last = 0.0, worst = 0.0;
    const int n = 100000, window = 2000;
    for (int k = 0; k < n; ++k) {
      langevin_step(e, undriven, 0.0, dt, k * dt);
      const double err = energy() - e0;
      worst = std::max(worst, std::abs(err));
      if (k < window) first += err;
      if (k >= n - window) last += err;
    }
    CHECK(std::abs(last - first) / window / std::abs(e0) < 1e-6);
    CHECK(worst / std::abs(e0) < 1e-4);
  }

  TEST_CASE("free Langevin ensemble: Var_p grows as 2 D t") {
    const FreeParticle free(1.0);
    const double d = 0.025, dt = 0.01;
    ParticleEnsemble e = sample_gaussian_ensemble(GaussianInitialState{0, 0, 1, 1, 0}, 100000, 11);
    const std::vector<double> p0 = e.p;
    for (int k = 0; k < 1000; ++k) langevin_step(e, free, d, dt, k * dt);
    const double growth = sample_var(e.p) - sample_var(p0);
    // Increment of the sample variance: 2 cov(p0, W) + var(W) has standard
    // error sqrt((4 var_p 2Dt + 2 (2Dt)^2) / N).
    const double w = 2 * d * 10.0;
    const double se = std::sqrt((4.0 * 1.0 * w + 2.0 * w * w) / 1e5);
    CHECK(std::abs(growth - w) < 3.0 * se);
  }

  TEST_CASE("harmonic ensemble mean follows the orbit to O(dt^2)") {
    const HarmonicOracle h(1.0, 4.0);
    const double w = h.angular_frequency();
    for (int refine : {1, 2}) {
      ParticleEnsemble e = single(1.0, 1.0);
      const double dt = 0.01 / refine;
      const int n = 314 * refine;
      for (int k = 0; k < n; ++k) langevin_step(e, h, 0.0, dt, k * dt);
      const double t = n * dt;
      const double err = std::abs(e.x[0] - (std::cos(w * t) + std::sin(w * t) / w));
      CHECK(err < 2e-4 / (refine * refine));
    }
  }

  TEST_CASE("tangent dynamics") {
    SUBCASE("harmonic tangent stays bounded") {
      const HarmonicOracle h(1.0, 4.0);
      ParticleEnsemble e = single(1.0, 0.0);
      double worst = 0.0;
      for (int k = 0; k < 100000; ++k) {
        tangent_step(e, h, 0.01, k * 0.01);
        langevin_step(e, h, 0.0, 0.01, k * 0.01);
        worst = std::max(worst, std::hypot(e.tangent_x[0], e.tangent_p[0]));
      }
      CHECK(worst < 2.0);
    }
    SUBCASE("inverted quadratic saddle grows at sqrt(2A/m)") {
      const HarmonicOracle saddle(1.0, -20.0);  // V = -10 x^2
      ParticleEnsemble e = single(0.0, 0.0);
      const double dt = 1e-4;
      for (int k = 0; k < 50000; ++k) {
        tangent_step(e, saddle, dt, k * dt);
        langevin_step(e, saddle, 0.0, dt, k * dt);
        if (k % 1000 == 999) renormalize_tangents(e);
      }
      renormalize_tangents(e);
      // Early contraction of the stable component costs ln 2 at most.
      const double rate = e.log_stretch[0] / 5.0;
      CHECK(rate == doctest::Approx(std::sqrt(20.0)).epsilon(0.03));
    }
    SUBCASE("zero tangent stays zero") {
      ParticleEnsemble e = single(-3.0, 8.0);
      e.tangent_x[0] = 0.0;
      for (int k = 0; k < 1000; ++k) tangent_step(e, well, 1e-3, k * 1e-3);
      CHECK(e.tangent_x[0] == 0.0);
      CHECK(e.tangent_p[0] == 0.0);
      renormalize_tangents(e);
      CHECK(e.log_stretch[0] == 0.0);
    }
  }

  TEST_CASE("Benettin estimate: harmonic oracle is integrable") {
    const HarmonicOracle h(1.0, 4.0);
    LyapunovOptions o;
    o.x_limit = 10.0;
    o.p_limit = 20.0;
    const LyapunovEstimate e = benettin_lyapunov(h, GaussianInitialState{1, 0, 0.025, 0.1, 0}, 0.0, 0.01, 100.0,
                                                 10, 4, o);
    CHECK(std::abs(e.mean) < 0.01);
    CHECK(e.per_trajectory.size() == 10);
    CHECK(e.mean == doctest::Approx(sample_mean(e.per_trajectory)));
  }

  TEST_CASE("Benettin preconditions") {
    const GaussianInitialState s = GaussianInitialState::paper_instance();
    CHECK_THROWS_AS(benettin_lyapunov(well, s, 0.0, 1e-3, 10 * well.period(), 20, 1), ConfigError);
    CHECK_THROWS_AS(benettin_lyapunov(well, s, 0.0, 1e-3, 25 * well.period(), 5, 1), ConfigError);
  }

  TEST_CASE("Benettin estimate is deterministic") {
    const GaussianInitialState s = GaussianInitialState::paper_instance();
    const double dt = well.period() / 512;
    const LyapunovEstimate a = benettin_lyapunov(well, s, 0.025, dt, 20 * well.period(), 10, 3);
    const LyapunovEstimate b = benettin_lyapunov(well, s, 0.025, dt, 20 * well.period(), 10, 3);
    CHECK(a.per_trajectory == b.per_trajectory);
  }

  TEST_CASE("histogram is cell centred and normalized") {
    ParticleEnsemble e = single(0.0, 0.0);
    e.x = {0.0, 0.24, 0.26, 5.0};
    e.p = {0.0, 0.0, 0.0, 0.0};
    e.stream_ids = {0, 1, 2, 3};
    const PhaseField h = ensemble_histogram(e, build_axis(-1, 1, 8), build_axis(-1, 1, 8));
    CHECK(integrate_field(h) == doctest::Approx(1.0));
    // Node 0 cell is [-0.125, 0.125), node 0.25 cell is [0.125, 0.375).
    const double cell = h.cell_area();
    CHECK(h.at(4, 4) * cell == doctest::Approx(1.0 / 3.0));
    CHECK(h.at(5, 4) * cell == doctest::Approx(2.0 / 3.0));
  }
}
