#include "qcc/classical.hpp"

#include <cmath>

#include "qcc/rng.hpp"

namespace qcc {

ParticleEnsemble sample_gaussian_ensemble(const GaussianInitialState& init, std::size_t count,
                                          std::uint64_t master_seed) {
  if (count < 2) throw ConfigError("ensemble needs at least two particles");
  init.validate();
  ParticleEnsemble e;
  e.master_seed = master_seed;
  e.x.resize(count);
  e.p.resize(count);
  e.tangent_x.assign(count, 1.0);
  e.tangent_p.assign(count, 0.0);
  e.log_stretch.assign(count, 0.0);
  e.stream_ids.resize(count);
  const double sx = std::sqrt(init.var_x);
  const double slope = init.cov_xp / init.var_x;
  const double sp_cond = std::sqrt(init.var_p - init.cov_xp * slope);
  std::vector<double> dx(count);
  for (std::size_t i = 0; i < count; ++i) {
    e.stream_ids[i] = i;
    const ParticleStream stream(master_seed, i);
    const double z1 = stream.normal(0, stream_tag::initial_x);
    const double z2 = stream.normal(0, stream_tag::initial_p);
    dx[i] = sx * z1;
    e.x[i] = init.x0 + dx[i];
    e.p[i] = init.p0 + slope * dx[i] + sp_cond * z2;
  }
  const double mean_dx = compensated_sum(dx) / static_cast<double>(count);
  e.mean_outlier = std::abs(mean_dx) > 4.0 * std::sqrt(init.var_x / static_cast<double>(count));
  return e;
}

void langevin_step(ParticleEnsemble& e, const PotentialModel& potential, double diffusion,
                   double dt, double t) {
  const double m = potential.mass();
  const Polynomial f0 = potential.force_polynomial(t);
  const Polynomial f1 = potential.force_polynomial(t + dt);
  const double noise = std::sqrt(2.0 * diffusion * dt);
  const std::size_t n = e.size();
  for (std::size_t i = 0; i < n; ++i) {
    double x = e.x[i];
    double p = e.p[i];
    p -= 0.5 * dt * f0(x);
    x += dt * p / m;
    p -= 0.5 * dt * f1(x);
    e.x[i] = x;
    e.p[i] = p;
  }
  if (diffusion > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const ParticleStream stream(e.master_seed, e.stream_ids[i]);
      e.p[i] += noise * stream.normal(e.step_index, stream_tag::langevin);
    }
  }
  e.time = t + dt;
  ++e.step_index;
}

void tangent_step(ParticleEnsemble& e, const PotentialModel& potential, double dt, double t) {
  const double m = potential.mass();
  const Polynomial f0 = potential.force_polynomial(t);
  const Polynomial curvature = potential.static_polynomial().derivative().derivative();
  const std::size_t n = e.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = e.x[i];
    const double p_half = e.p[i] - 0.5 * dt * f0(x);
    const double x_next = x + dt * p_half / m;
    double dx = e.tangent_x[i];
    double dp = e.tangent_p[i];
    dp -= 0.5 * dt * curvature(x) * dx;
    dx += dt * dp / m;
    dp -= 0.5 * dt * curvature(x_next) * dx;
    e.tangent_x[i] = dx;
    e.tangent_p[i] = dp;
  }
}

void renormalize_tangents(ParticleEnsemble& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double norm = std::hypot(e.tangent_x[i], e.tangent_p[i]);
    if (norm == 0.0) continue;  // the zero tangent is a fixed point
    e.log_stretch[i] += std::log(norm);
    e.tangent_x[i] /= norm;
    e.tangent_p[i] /= norm;
  }
}

PhaseField ensemble_histogram(const ParticleEnsemble& e, const AxisGrid& x_axis,
                              const AxisGrid& p_axis) {
  PhaseField f(x_axis, p_axis, e.time);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double ux = (e.x[i] - x_axis.minimum()) / x_axis.spacing() + 0.5;
    const double up = (e.p[i] - p_axis.minimum()) / p_axis.spacing() + 0.5;
    if (!(ux >= 0.0 && up >= 0.0)) continue;
    const auto ix = static_cast<std::size_t>(ux);
    const auto ip = static_cast<std::size_t>(up);
    if (ix >= x_axis.count() || ip >= p_axis.count()) continue;
    f.at(ix, ip) += 1.0;
    ++inside;
  }
  if (inside > 0) {
    const double w = 1.0 / (static_cast<double>(inside) * f.cell_area());
    for (double& v : f.values) v *= w;
  }
  return f;
}

double LyapunovEstimate::standard_error() const {
  return per_trajectory.empty() ? 0.0
                                : stddev / std::sqrt(static_cast<double>(per_trajectory.size()));
}

namespace {

std::size_t renorm_steps(double renorm_interval, double dt) {
  if (!(renorm_interval > 0.0)) throw ConfigError("renormalization interval must be positive");
  const auto n = static_cast<std::size_t>(std::llround(renorm_interval / dt));
  return n == 0 ? 1 : n;
}

}  // namespace

LyapunovEstimate benettin_lyapunov(const PotentialModel& potential,
                                   const GaussianInitialState& init, double diffusion, double dt,
                                   double horizon, std::size_t trajectories,
                                   std::uint64_t master_seed, const LyapunovOptions& options) {
  if (!(horizon >= 20.0 * potential.period() * (1.0 - 1e-12))) {
    throw ConfigError("Lyapunov horizon must be at least 20 periods");
  }
  if (trajectories < 10) throw ConfigError("Lyapunov estimate needs at least 10 trajectories");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");

  ParticleEnsemble e = sample_gaussian_ensemble(init, trajectories, master_seed);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t every = renorm_steps(options.renorm_interval, dt);
  const double tangent_noise = std::sqrt(2.0 * diffusion * dt);
  std::vector<char> escaped(trajectories, 0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    tangent_step(e, potential, dt, t);
    if (options.noisy_tangents && diffusion > 0.0) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        const ParticleStream stream(e.master_seed, e.stream_ids[i]);
        e.tangent_p[i] += tangent_noise * stream.normal(e.step_index, stream_tag::sweep + 1);
      }
    }
    langevin_step(e, potential, diffusion, dt, t);
    if ((s + 1) % every == 0 || s + 1 == steps) {
      renormalize_tangents(e);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (!(std::abs(e.x[i]) <= options.x_limit && std::abs(e.p[i]) <= options.p_limit)) {
          escaped[i] = 1;
        }
      }
    }
  }

  LyapunovEstimate est;
  est.horizon = static_cast<double>(steps) * dt;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (escaped[i]) {
      ++est.excluded;
      continue;
    }
    est.per_trajectory.push_back(e.log_stretch[i] / est.horizon);
  }
  if (est.per_trajectory.empty()) throw NumericalError("every Lyapunov trajectory escaped");
  const double n = static_cast<double>(est.per_trajectory.size());
  est.mean = compensated_sum(est.per_trajectory) / n;
  std::vector<double> sq;
  for (double v : est.per_trajectory) sq.push_back((v - est.mean) * (v - est.mean));
  est.stddev = n > 1 ? std::sqrt(compensated_sum(sq) / (n - 1.0)) : 0.0;
  est.exponent = est.mean;
  return est;
}

double trajectory_lyapunov(const PotentialModel& potential, double x0, double p0, double dt,
                           double horizon, double renorm_interval) {
  ParticleEnsemble e;
  e.x = {x0};
  e.p = {p0};
  e.tangent_x = {1.0};
  e.tangent_p = {0.0};
  e.log_stretch = {0.0};
  e.stream_ids = {0};
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t every = renorm_steps(renorm_interval, dt);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    tangent_step(e, potential, dt, t);
    langevin_step(e, potential, 0.0, dt, t);
    if ((s + 1) % every == 0 || s + 1 == steps) renormalize_tangents(e);
  }
  return e.log_stretch[0] / (static_cast<double>(steps) * dt);
}

}  // namespace qcc
