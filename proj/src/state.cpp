#include "qcc/state.hpp"

#include <cmath>
#include <numbers>

namespace qcc {

EvolverSettings EvolverSettings::from_period(double period, std::size_t steps_per_period,
                                             double hbar, double diffusion,
                                             std::size_t output_every) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("reference period must be positive and finite");
  }
  if (steps_per_period == 0) throw ConfigError("steps per period must be positive");
  EvolverSettings s;
  s.hbar = hbar;
  s.diffusion = diffusion;
  s.dt = period / static_cast<double>(steps_per_period);
  s.output_every = output_every;
  s.validate();
  return s;
}

void EvolverSettings::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("hbar must be positive");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) {
    throw ConfigError("diffusion constant must be non-negative");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  if (output_every == 0) throw ConfigError("output cadence must be at least one step");
}

GaussianInitialState GaussianInitialState::paper_instance() {
  return GaussianInitialState{-3.0, 8.0, 0.0025, 1.0, 0.0};
}

void GaussianInitialState::validate() const {
  if (!(var_x > 0.0) || !(var_p > 0.0)) {
    throw ConfigError("initial state variances must be positive");
  }
  if (!(var_x * var_p - cov_xp * cov_xp > 0.0)) {
    throw ConfigError("initial state covariance matrix is not positive definite");
  }
  if (!std::isfinite(x0) || !std::isfinite(p0)) throw ConfigError("initial centre must be finite");
}

bool GaussianInitialState::is_minimum_uncertainty(double hbar, double tolerance) const {
  const double bound = 0.25 * hbar * hbar;
  return std::abs(var_x * var_p - cov_xp * cov_xp - bound) <= tolerance * bound;
}

PhaseField gaussian_phase_field(const GaussianInitialState& init, const AxisGrid& x_axis,
                                const AxisGrid& p_axis) {
  init.validate();
  PhaseField f(x_axis, p_axis, 0.0);
  const double det = init.var_x * init.var_p - init.cov_xp * init.cov_xp;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  // Inverse covariance.
  const double ixx = init.var_p / det;
  const double ipp = init.var_x / det;
  const double ixp = -init.cov_xp / det;
  for (std::size_t i = 0; i < f.nx(); ++i) {
    const double dx = x_axis.node(i) - init.x0;
    for (std::size_t j = 0; j < f.np(); ++j) {
      const double dp = p_axis.node(j) - init.p0;
      const double q = ixx * dx * dx + 2.0 * ixp * dx * dp + ipp * dp * dp;
      f.at(i, j) = norm * std::exp(-0.5 * q);
    }
  }
  return f;
}

}  // namespace qcc
