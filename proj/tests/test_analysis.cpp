#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcc/analysis.hpp"
#include "qcc/classical.hpp"
#include "qcc/state.hpp"

using namespace qcc;

namespace {

// Series with <x> = x(t), <p> = p(t) and fixed central moments.
template <class X, class P>
MomentSeries series(std::size_t n, double h, X x, P p, double var_p = 1.0) {
  MomentSeries s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    s[i].t = t;
    s[i].mean_x = x(t);
    s[i].mean_p = p(t);
    s[i].central_x2 = 0.01;
    s[i].central_p2 = var_p;
  }
  return s;
}

PhaseField point_mass(const AxisGrid& x, const AxisGrid& p, std::size_t ix, std::size_t ip) {
  PhaseField f(x, p);
  f.at(ix, ip) = 1.0 / f.cell_area();
  return f;
}

}  // namespace

TEST_SUITE("analysis") {
  const DrivenDoubleWell well = DrivenDoubleWell::paper_regime();

  TEST_CASE("moments of the Gaussian state") {
    const GaussianInitialState s = GaussianInitialState::paper_instance();
    const PhaseField f = gaussian_phase_field(s, build_axis(-4, -2, 256), build_axis(-1, 17, 512));
    const MomentRecord m = compute_moments(f, well, 0.0);
    CHECK(m.mean_x == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(m.mean_p == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(m.central_x2 == doctest::Approx(0.0025).epsilon(1e-9));
    CHECK(m.central_p2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(m.central_x3) < 1e-12);
    CHECK(std::abs(m.central_p3) < 1e-9);
    // Gaussian identity mu4 = 3 sigma^4.
    CHECK(m.central_x4 == doctest::Approx(3 * 0.0025 * 0.0025).epsilon(1e-8));
    CHECK(m.central_p4 == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(std::abs(m.cross_xp) < 1e-12);
    // <V> from the normal raw moments.
    const double x2 = 9.0 + 0.0025, x4 = 81.0 + 6 * 9 * 0.0025 + 3 * 0.0025 * 0.0025;
    const double v = well.b() * x4 - well.a() * x2 + well.drive(0.0) * -3.0;
    CHECK(m.energy == doctest::Approx(65.0 / 2.0 + v).epsilon(1e-9));
    CHECK(m.raw_x(4) == doctest::Approx(x4).epsilon(1e-12));
    CHECK_THROWS_AS(m.raw_x(5), ConfigError);
  }

  TEST_CASE("moments reject unnormalized fields") {
    PhaseField f = gaussian_phase_field(GaussianInitialState::paper_instance(), build_axis(-4, -2, 64),
                                        build_axis(3, 13, 64));
    for (double& v : f.values) v *= 1.01;
    CHECK_THROWS_AS(compute_moments(f, well, 0.0), NumericalError);
  }

  TEST_CASE("ensemble moments are sample averages") {
    ParticleEnsemble e = sample_gaussian_ensemble(GaussianInitialState{0, 0, 1, 1, 0}, 2, 1);
    e.x = {1.0, 3.0};
    e.p = {-2.0, 2.0};
    const MomentRecord m = compute_moments(e, well, 0.5);
    CHECK(m.t == 0.5);
    CHECK(m.mean_x == 2.0);
    CHECK(m.mean_p == 0.0);
    CHECK(m.central_x2 == doctest::Approx(1.0));
    CHECK(m.central_p2 == doctest::Approx(4.0));
    CHECK(m.central_x4 == doctest::Approx(1.0));
    CHECK(m.cross_xp == doctest::Approx(2.0));
    CHECK(m.energy == doctest::Approx(2.0 + 0.5 * (well.value(1.0, 0.5) + well.value(3.0, 0.5))));
  }

  TEST_CASE("field and ensemble moments agree on a point mass") {
    const AxisGrid x = build_axis(-4, 4, 64), p = build_axis(-4, 4, 64);
    const PhaseField f = point_mass(x, p, 40, 20);
    ParticleEnsemble e = sample_gaussian_ensemble(GaussianInitialState{0, 0, 1, 1, 0}, 2, 1);
    e.x.assign(2, x.node(40));
    e.p.assign(2, p.node(20));
    const MomentRecord a = compute_moments(f, well, 0.3);
    const MomentRecord b = compute_moments(e, well, 0.3);
    CHECK(a.mean_x == doctest::Approx(b.mean_x));
    CHECK(a.mean_p == doctest::Approx(b.mean_p));
    CHECK(a.energy == doctest::Approx(b.energy));
    CHECK(std::abs(a.central_x2) < 1e-12);
  }

  TEST_CASE("moment residuals") {
    SUBCASE("frozen dynamics") {
      const FreeParticle free(1.0);
      const MomentSeries s = series(40, 0.1, [](double) { return 1.5; }, [](double) { return 0.0; });
      const ResidualSummary r = moment_residuals(s, free, 0.0);
      CHECK(r.residuals.size() == 36);
      CHECK(r.r3_closed);
      for (const MomentResidual& x : r.residuals) {
        CHECK(x.r1 == 0.0);
        CHECK(x.r2 == 0.0);
        CHECK(x.r3 == 0.0);
      }
    }
    SUBCASE("harmonic orbit") {
      const HarmonicOracle h(1.0, 4.0);
      const double w = 2.0;
      MomentSeries s = series(
          400, 0.01, [&](double t) { return std::cos(w * t); }, [&](double t) { return -w * std::sin(w * t); });
      // Var_p and C_xp stay fixed here, so <p^2> = 1 + <p>^2 and
      // d<p^2>/dt = -2k <x><p> while 2<pV'> = 2k (C_xp + <x><p>).
      const ResidualSummary r = moment_residuals(s, h, 0.0);
      CHECK(r.r1_relative < 1e-4);
      CHECK(r.r2_relative < 1e-4);
      CHECK(r.r3_relative < 1e-4);
    }
    SUBCASE("free diffusion recovers 2D") {
      const FreeParticle free(1.0);
      const double d = 0.025;
      MomentSeries s = series(50, 0.1, [](double) { return 0.0; }, [](double) { return 0.0; });
      for (MomentRecord& m : s) m.central_p2 = 1.0 + 2.0 * d * m.t;
      const ResidualSummary r = moment_residuals(s, free, d);
      for (const MomentResidual& x : r.residuals) {
        CHECK(x.dp2_dt == doctest::Approx(2.0 * d).epsilon(0.01));
        CHECK(std::abs(x.r3) < 1e-3 * d);
      }
    }
    SUBCASE("quartic force cannot close r3") {
      const MomentSeries s = series(20, 0.1, [](double) { return -3.0; }, [](double) { return 0.0; });
      const ResidualSummary r = moment_residuals(s, well, 0.0);
      CHECK_FALSE(r.r3_closed);
      CHECK_FALSE(r.residuals.front().r3_closed);
    }
    SUBCASE("irregular spacing and short series") {
      MomentSeries s = series(20, 0.1, [](double) { return 0.0; }, [](double) { return 0.0; });
      s[7].t += 0.01;
      CHECK_THROWS_AS(moment_residuals(s, well, 0.0), ConfigError);
      s.resize(4);
      CHECK_THROWS(moment_residuals(s, well, 0.0));
    }
  }

  TEST_CASE("divergence time") {
    const auto classical = [](double t) { return std::sin(t); };
    const auto none = [](double) { return 0.0; };
    const MomentSeries c = series(100, 0.1, classical, none);
    CHECK_FALSE(divergence_time(c, c).has_value());

    const MomentSeries q = series(100, 0.1, [&](double t) { return classical(t) + (t > 2.95 ? 0.5 : 0.0); }, none);
    REQUIRE(divergence_time(q, c).has_value());
    CHECK(*divergence_time(q, c) == doctest::Approx(3.0));

    SUBCASE("short excursions are debounced") {
      MomentSeries blip = c;
      for (std::size_t i = 10; i < 14; ++i) blip[i].mean_x += 0.5;
      CHECK_FALSE(divergence_time(blip, c).has_value());
      blip[14].mean_x += 0.5;
      CHECK(*divergence_time(blip, c) == doctest::Approx(1.0));
    }
    SUBCASE("invariant under common rescaling of x") {
      MomentSeries q2 = q, c2 = c;
      for (std::size_t i = 0; i < q2.size(); ++i) {
        q2[i].mean_x *= 7.0;
        c2[i].mean_x *= 7.0;
      }
      CHECK(*divergence_time(q2, c2) == *divergence_time(q, c));
    }
    SUBCASE("swapping the roles changes only the reference rms") {
      CHECK(divergence_time(c, q).has_value());
    }
    SUBCASE("errors") {
      MomentSeries shorter = c;
      shorter.pop_back();
      CHECK_THROWS_AS(divergence_time(q, shorter), ConfigError);
      MomentSeries shifted = c;
      shifted[3].t += 0.05;
      CHECK_THROWS_AS(divergence_time(q, shifted), ConfigError);
      CHECK_THROWS_AS(divergence_time(q, c, DivergenceOptions{1.5, 5}), ConfigError);
    }
  }

  TEST_CASE("break time") {
    const BreakTimeEstimate b = break_time(0.45, 0.6, 1.0, 0.1);
    CHECK(b.t_hbar == doctest::Approx(std::log(6.0) / 0.45));
    CHECK(b.t_hbar == doctest::Approx(3.98).epsilon(1e-3));
    CHECK(b.valid);
    // Doubling the argument adds ln 2 / lambda.
    CHECK(break_time(0.45, 1.2, 1.0, 0.1).t_hbar - b.t_hbar == doctest::Approx(std::log(2.0) / 0.45));
    CHECK(break_time(0.45, 0.6, 1.0, 0.05).t_hbar > b.t_hbar);
    CHECK(break_time(0.9, 0.6, 1.0, 0.1).t_hbar < b.t_hbar);
    const BreakTimeEstimate edge = break_time(0.45, 0.1, 1.0, 0.1);
    CHECK(edge.t_hbar == doctest::Approx(0.0));
    CHECK_FALSE(edge.valid);
    CHECK_FALSE(break_time(0.45, 0.05, 1.0, 0.1).valid);
    CHECK_THROWS_AS(break_time(0.0, 0.6, 1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(break_time(0.45, 0.6, 1.0, -0.1), ConfigError);
  }

  TEST_CASE("chi estimate") {
    const AxisGrid x = build_axis(-8, 8, 128), p = build_axis(-4, 4, 16);
    SUBCASE("point mass where the drive vanishes") {
      const double t = 0.5 * std::numbers::pi / well.drive_frequency();
      const std::size_t ix = 88;  // node x = 3
      REQUIRE(x.node(ix) == doctest::Approx(3.0));
      const ChiEstimate c = chi_estimate(point_mass(x, p, ix, 3), well, t);
      // V' = 4B 27 - 6A = -6, V''' = 72 B = 36.
      CHECK(c.chi == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-9));
      CHECK(c.excluded_mass == 0.0);
    }
    SUBCASE("mass on the V''' zero is excluded") {
      PhaseField f = point_mass(x, p, 64, 3);  // x = 0
      for (double& v : f.values) v *= 0.5;
      f.at(88, 3) = 0.5 / f.cell_area();
      const ChiEstimate c = chi_estimate(f, well, 0.5 * std::numbers::pi / well.drive_frequency());
      CHECK(c.excluded_mass == doctest::Approx(0.5));
      CHECK(c.chi == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-9));
    }
    SUBCASE("harmonic potential has no third derivative") {
      const HarmonicOracle h(1.0, 4.0);
      CHECK_THROWS_AS(chi_estimate(point_mass(x, p, 88, 3), h, 0.0), NumericalError);
    }
    SUBCASE("density overload") {
      std::vector<double> w(x.count(), 0.0);
      w[88] = 1.0 / x.spacing();
      const double t = 0.5 * std::numbers::pi / well.drive_frequency();
      CHECK(chi_estimate(w, x, well, t).chi == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-9));
      w.pop_back();
      CHECK_THROWS_AS(chi_estimate(w, x, well, t), NumericalError);
    }
  }

  TEST_CASE("coherence scale") {
    CHECK(coherence_scale(0.025, 0.5) == doctest::Approx(0.316227766));
    CHECK(coherence_scale(0.0, 0.5) == 0.0);
    CHECK_THROWS_AS(coherence_scale(0.025, 0.0), ConfigError);
    CHECK_THROWS_AS(coherence_scale(-1.0, 0.5), ConfigError);
  }

  TEST_CASE("negativity and ringing") {
    const AxisGrid x = build_axis(-1, 1, 8), p = build_axis(-1, 1, 8);
    PhaseField f(x, p);
    f.at(2, 2) = 3.0;
    f.at(5, 5) = -1.0;
    f.at(6, 1) = -0.5;
    CHECK(wigner_negativity(f) == doctest::Approx(1.5 * f.cell_area()));
    CHECK(ringing_ratio(f) == doctest::Approx(0.5 / 1.5 * 1.0));
    const PhaseField g = gaussian_phase_field(GaussianInitialState{0, 0, 0.05, 0.05, 0}, x, p);
    CHECK(wigner_negativity(g) == 0.0);
    CHECK(ringing_ratio(g) == 0.0);
  }

  TEST_CASE("distribution distance") {
    const AxisGrid x = build_axis(-2, 2, 32), p = build_axis(-2, 2, 32);
    const PhaseField a = gaussian_phase_field(GaussianInitialState{-0.5, 0, 0.05, 0.05, 0}, x, p);
    const PhaseField b = gaussian_phase_field(GaussianInitialState{0.5, 0.2, 0.08, 0.05, 0.01}, x, p);
    CHECK(distribution_distance(a, a).l1 == 0.0);
    CHECK(distribution_distance(a, a).l2 == 0.0);
    CHECK(distribution_distance(a, b).l1 == distribution_distance(b, a).l1);
    CHECK(distribution_distance(a, b).l2 == distribution_distance(b, a).l2);
    // Disjoint supports give the maximal L1 for normalized densities.
    const PhaseField c = point_mass(x, p, 3, 3), d = point_mass(x, p, 20, 20);
    CHECK(distribution_distance(c, d).l1 == doctest::Approx(2.0));
    CHECK(distribution_distance(c, d).l2 == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(distribution_distance(a, PhaseField(build_axis(-2, 2, 16), p)), ConfigError);
  }

  TEST_CASE("comparison report") {
    const auto classical = [](double t) { return std::sin(t); };
    const auto none = [](double) { return 0.0; };
    const MomentSeries c = series(200, 0.1, classical, none);
    const ComparisonReport same = compare_series(c, c);
    CHECK_FALSE(same.divergence_time.has_value());
    CHECK_FALSE(same.saturated_discrepancy.has_value());
    CHECK(same.abs_delta_x.size() == 200);

    const MomentSeries q = series(200, 0.1, [&](double t) { return classical(t) + (t > 4.95 ? 0.3 : 0.0); },
                                  none);
    const ComparisonReport r = compare_series(q, c);
    REQUIRE(r.divergence_time.has_value());
    CHECK(*r.divergence_time == doctest::Approx(5.0));
    REQUIRE(r.saturated_discrepancy.has_value());
    CHECK(*r.saturated_discrepancy == doctest::Approx(0.3 / r.reference_rms));
    CHECK(mean_abs_delta_x(r, 10.0, 15.0) == doctest::Approx(0.3));
    CHECK(mean_abs_delta_x(r, 0.0, 4.0) == 0.0);
    CHECK_THROWS_AS(mean_abs_delta_x(r, 50.0, 60.0), ConfigError);
  }
}
