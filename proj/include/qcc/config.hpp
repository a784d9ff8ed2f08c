#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qcc/analysis.hpp"
#include "qcc/classical.hpp"
#include "qcc/phase_space.hpp"
#include "qcc/potential.hpp"
#include "qcc/state.hpp"

namespace qcc {

enum class PotentialKind { double_well, harmonic, free };
enum class QuantumBackend { master, schrodinger };
enum class ClassicalBackend { grid, ensemble };

struct AxisSpec {
  double minimum = 0.0;
  double maximum = 0.0;
  std::size_t count = 0;

  AxisGrid build() const { return build_axis(minimum, maximum, count); }
  bool operator==(const AxisSpec&) const = default;
};

/// Initial-condition sampler and backend choice for sweeps.
struct SweepSettings {
  std::vector<double> values;
  std::size_t count = 10;
  double x_min = -4.0;
  double x_max = 4.0;
  double p_min = -10.0;
  double p_max = 10.0;
  // Window on the undriven energy p^2/2m + U(x) of the packet centre.
  double energy_min = -30.0;
  double energy_max = 0.0;
  double screen_periods = 20.0;
  double lambda_min = 0.2;
  std::size_t max_attempts = 1000;
  QuantumBackend quantum = QuantumBackend::schrodinger;
  ClassicalBackend classical = ClassicalBackend::ensemble;

  bool operator==(const SweepSettings&) const = default;
};

/// Complete description of one experiment. Physics parameters have no
/// defaults and must be given (directly or through a preset); numerical
/// knobs default to the values below.
struct RunConfig {
  std::string preset;

  PotentialKind potential_kind = PotentialKind::double_well;
  double mass = 0.0;
  double b = 0.0;
  double a = 0.0;
  double drive_amplitude = 0.0;
  double drive_frequency = 0.0;
  double spring = 0.0;
  double reference_period = 0.0;

  double hbar = 0.0;
  double diffusion = 0.0;
  GaussianInitialState initial;
  double periods = 0.0;

  AxisSpec x_grid{-8.0, 8.0, 2048};
  AxisSpec p_grid{-24.0, 24.0, 2048};
  std::size_t steps_per_period = 2048;
  std::size_t output_every = 16;
  std::vector<double> snapshot_periods;
  KernelMode kernel_mode = KernelMode::precomputed;

  std::size_t ensemble_count = 100000;
  std::uint64_t seed = 1;

  DivergenceOptions divergence;
  double chi_cutoff = -1.0;

  LyapunovOptions lyapunov;
  std::size_t lyapunov_trajectories = 100;
  double lyapunov_horizon_periods = 50.0;

  QuantumBackend compare_quantum = QuantumBackend::master;
  ClassicalBackend compare_classical = ClassicalBackend::grid;
  bool compare_schrodinger = false;
  bool compare_ensemble = false;

  double converge_periods = 1.0;
  double converge_tolerance = 1e-4;

  SweepSettings sweep;

  std::unique_ptr<PotentialModel> potential() const;
  double period() const;
  double dt() const { return period() / static_cast<double>(steps_per_period); }
  std::size_t total_steps() const;
  EvolverSettings evolver_settings() const;
  /// Step indices of snapshots, sorted and unique. Double-well presets always
  /// include 0, 4T and 8T when they fall inside the run.
  std::vector<std::size_t> snapshot_steps() const;
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Built-in presets: paper-fig1, paper-fig2, harmonic.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);
/// Canonical text form; parse_config_text(write_config(c)) == c.
std::string write_config(const RunConfig& config);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_digest(const RunConfig& config);

std::string to_string(QuantumBackend b);
std::string to_string(ClassicalBackend b);

}  // namespace qcc
