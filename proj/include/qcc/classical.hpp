#pragma once

#include <cstdint>
#include <vector>

#include "qcc/grid.hpp"
#include "qcc/potential.hpp"
#include "qcc/state.hpp"

namespace qcc {

/// Phase-space sample points with tangent vectors and private random
/// streams. Noise for particle i at step n is a pure function of
/// (master_seed, stream_ids[i], n).
struct ParticleEnsemble {
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> tangent_x;
  std::vector<double> tangent_p;
  std::vector<double> log_stretch;
  std::vector<std::uint64_t> stream_ids;
  std::uint64_t master_seed = 0;
  std::uint64_t step_index = 0;
  double time = 0.0;
  // Sample mean of x fell outside x0 +- 4 sqrt(var_x / N).
  bool mean_outlier = false;

  std::size_t size() const { return x.size(); }
};

ParticleEnsemble sample_gaussian_ensemble(const GaussianInitialState& init, std::size_t count,
                                          std::uint64_t master_seed);

/// Velocity Verlet on -V'(x, t) (kicks at t and t + dt) followed by the
/// momentum kick sqrt(2 D dt) xi. Advances time and step_index.
void langevin_step(ParticleEnsemble& e, const PotentialModel& potential, double diffusion,
                   double dt, double t);

/// Tangent map of the deterministic Verlet step from the current (x, p):
/// the same stages as langevin_step with V'' in place of V'. Positions and
/// momenta are not modified, so calling this before langevin_step at the
/// same t evolves the pair consistently.
void tangent_step(ParticleEnsemble& e, const PotentialModel& potential, double dt, double t);

/// Renormalizes every tangent to unit length, accumulating ln of the norm.
void renormalize_tangents(ParticleEnsemble& e);

/// Histogram on the grid cells (cell j spans node_j +- h/2), normalized to
/// unit mass over the particles that fall inside the box.
PhaseField ensemble_histogram(const ParticleEnsemble& e, const AxisGrid& x_axis,
                              const AxisGrid& p_axis);

struct LyapunovOptions {
  double renorm_interval = 0.25;
  bool noisy_tangents = false;
  // Box outside of which a trajectory counts as escaped.
  double x_limit = 8.0;
  double p_limit = 24.0;

  bool operator==(const LyapunovOptions&) const = default;
};

struct LyapunovEstimate {
  double horizon = 0.0;
  double exponent = 0.0;
  std::vector<double> per_trajectory;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t excluded = 0;

  double standard_error() const;
};

/// Benettin estimate: tangent renormalized every renorm_interval, finite-time
/// exponent ln(total stretch) / horizon per trajectory. Initial points are
/// sampled from `init`. Requires horizon >= 20 periods and at least 10
/// trajectories.
LyapunovEstimate benettin_lyapunov(const PotentialModel& potential,
                                   const GaussianInitialState& init, double diffusion, double dt,
                                   double horizon, std::size_t trajectories,
                                   std::uint64_t master_seed, const LyapunovOptions& options = {});

/// Finite-time exponent of a single trajectory, without the horizon check
/// (used to screen initial conditions).
double trajectory_lyapunov(const PotentialModel& potential, double x0, double p0, double dt,
                           double horizon, double renorm_interval);

}  // namespace qcc
