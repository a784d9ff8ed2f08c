#pragma once

#include <cstddef>

#include "qcc/grid.hpp"

namespace qcc {

struct EvolverSettings {
  double hbar = 0.1;
  double diffusion = 0.0;  // D, momentum^2 / time
  double dt = 0.0;
  std::size_t output_every = 1;

  /// dt = period / steps_per_period, so whole periods land on steps.
  static EvolverSettings from_period(double period, std::size_t steps_per_period, double hbar,
                                     double diffusion, std::size_t output_every = 1);
  void validate() const;
};

/// Gaussian phase-space distribution, or a pure packet when it saturates
/// the uncertainty bound.
struct GaussianInitialState {
  double x0 = 0.0;
  double p0 = 0.0;
  double var_x = 1.0;
  double var_p = 1.0;
  double cov_xp = 0.0;

  /// (-3, 8, 0.0025, 1): the minimum-uncertainty packet for hbar = 0.1.
  static GaussianInitialState paper_instance();

  void validate() const;
  bool is_minimum_uncertainty(double hbar, double tolerance = 1e-9) const;
  bool operator==(const GaussianInitialState&) const = default;
};

/// Analytic normalized Gaussian sampled on the grid.
PhaseField gaussian_phase_field(const GaussianInitialState& init, const AxisGrid& x_axis,
                                const AxisGrid& p_axis);

}  // namespace qcc
