#include <doctest.h>

#include <cmath>

#include "qcc/analysis.hpp"
#include "qcc/potential.hpp"
#include "qcc/state.hpp"

using namespace qcc;

TEST_SUITE("state") {
  TEST_CASE("reference instance saturates the uncertainty bound") {
    const GaussianInitialState s = GaussianInitialState::paper_instance();
    CHECK(s.x0 == -3.0);
    CHECK(s.p0 == 8.0);
    CHECK(s.var_x == 0.0025);
    CHECK(s.var_p == 1.0);
    CHECK(s.is_minimum_uncertainty(0.1));
    CHECK_FALSE(s.is_minimum_uncertainty(0.2));
  }

  TEST_CASE("invalid states") {
    CHECK_THROWS_AS((GaussianInitialState{0, 0, 0.0, 1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((GaussianInitialState{0, 0, 1.0, -1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((GaussianInitialState{0, 0, 1.0, 1.0, 1.0}.validate()), ConfigError);
  }

  TEST_CASE("evolver settings from a period") {
    const EvolverSettings s = EvolverSettings::from_period(2.0, 2048, 0.1, 0.025);
    CHECK(s.dt * 2048 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(EvolverSettings::from_period(2.0, 0, 0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(EvolverSettings::from_period(2.0, 16, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(EvolverSettings::from_period(2.0, 16, 0.1, -1.0), ConfigError);
  }

  TEST_CASE("analytic Gaussian field reproduces the requested moments") {
    const GaussianInitialState s{0.5, -1.0, 0.04, 0.3, 0.05};
    const PhaseField f = gaussian_phase_field(s, build_axis(-3, 3, 256), build_axis(-5, 5, 256));
    const MomentRecord m = compute_moments(f, FreeParticle(1.0), 0.0);
    CHECK(m.mean_x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(m.mean_p == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(m.central_x2 == doctest::Approx(0.04).epsilon(1e-10));
    CHECK(m.central_p2 == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(m.cross_xp == doctest::Approx(0.05).epsilon(1e-10));
  }
}
