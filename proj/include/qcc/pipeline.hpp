#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcc/analysis.hpp"
#include "qcc/config.hpp"

namespace qcc {

/// Output of one evolution backend. On a numerical failure the records up
/// to the failure are kept and `failure` holds the diagnostic.
struct BackendResult {
  std::string name;  // master | schrodinger | grid | ensemble
  MomentSeries moments;
  std::vector<PhaseField> snapshots;
  std::optional<PhaseField> final_field;    // phase-space backends
  std::optional<ComplexField> final_wave;   // schrodinger backend
  std::optional<std::string> failure;
  double max_boundary_mass = 0.0;
  double max_ringing = 0.0;  // grid backend: max over records of -min(f)/max(f)
  bool mean_outlier = false;  // ensemble backend
  std::vector<std::string> warnings;

  bool clean() const { return !failure; }
  const PhaseField* snapshot_at(double t) const;
};

/// Directly evolved Wigner function (master equation).
BackendResult run_quantum(const RunConfig& config);
BackendResult run_schrodinger(const RunConfig& config);
BackendResult run_classical(const RunConfig& config, ClassicalBackend backend);
inline BackendResult run_ensemble(const RunConfig& config) {
  return run_classical(config, ClassicalBackend::ensemble);
}

/// Moments CSV, snapshots, resolved config, version and checksums for a set
/// of backend runs in `dir`.
void write_run_artifacts(const std::filesystem::path& dir, const RunConfig& config,
                         const std::vector<const BackendResult*>& runs);
/// Rewrites dir/checksums.txt: FNV-1a and relative path of every other file.
void write_checksums(const std::filesystem::path& dir);

struct CompareResult {
  ComparisonReport report;
  std::vector<BackendResult> runs;
  std::string quantum_name;
  std::string classical_name;
  std::optional<double> late_mean_abs_delta_x;  // over [4T, 8T]
  std::optional<ChiEstimate> chi;
  std::string chi_note;  // why chi is absent
  std::vector<std::string> failures;

  bool clean() const { return failures.empty(); }
  const BackendResult* find(const std::string& name) const;
};

/// Master equation and classical grid on identical initial data, plus the
/// optional Schrodinger and ensemble backends. The designated primary pair
/// (compare.quantum / compare.classical) feeds the report. Independent
/// backends run on up to `jobs` threads. Artifacts are written when `out`
/// is non-empty, including a failure record if any backend aborted.
CompareResult run_compare(const RunConfig& config, const std::filesystem::path& out,
                          std::size_t jobs = 1);

enum class SweepAxis { hbar, diffusion, initial_condition };
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepRow {
  double value = 0.0;  // hbar or D, or the run index for initial conditions
  double x0 = 0.0;
  double p0 = 0.0;
  std::optional<double> divergence_time;
  std::optional<double> saturated_discrepancy;
  double lambda = 0.0;
  double chi = 0.0;
  BreakTimeEstimate prediction;
  std::optional<std::string> failure;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::hbar;
  std::vector<SweepRow> rows;
  std::optional<double> min_divergence;
  std::optional<double> mean_divergence;
  std::optional<double> max_divergence;
  std::size_t attempts = 0;  // initial-condition candidates drawn
};

/// Packet centres drawn uniformly from the sweep rectangle, kept when the
/// undriven energy lies in the window and the short-horizon exponent of the
/// centre trajectory is at least sweep.lambda_min.
std::vector<std::pair<double, double>> sample_initial_conditions(const RunConfig& config,
                                                                 std::size_t* attempts = nullptr);

/// Runs are independent jobs; a failing run is recorded and the sweep goes
/// on. Writes sweep.csv and sweep.json when `out` is non-empty.
SweepResult run_sweep(const RunConfig& config, SweepAxis axis, const std::filesystem::path& out,
                      std::size_t jobs = 1);

struct ConvergenceReport {
  Dynamics dynamics = Dynamics::quantum;
  double t = 0.0;
  double x_base = 0.0;     // dt, base grid
  double x_half = 0.0;     // dt / 2
  double x_quarter = 0.0;  // dt / 4
  std::optional<double> x_fine;  // dt, both axes doubled
  double temporal_delta = 0.0;   // |x_half - x_base|
  std::optional<double> spatial_delta;
  double order = 0.0;  // log2(|x_base - x_half| / |x_half - x_quarter|)
  double tolerance = 0.0;
  bool truncated = false;
  bool passed = false;
  std::vector<std::string> notes;
};

/// Reruns converge.periods with dt, dt/2, dt/4 and with a doubled grid, and
/// fails if <x> moves by more than converge.tolerance under refinement.
/// The doubled grid is skipped (and the report flagged truncated) when it
/// would exceed `max_cells`.
ConvergenceReport convergence_check(const RunConfig& config, Dynamics dynamics = Dynamics::quantum,
                                    std::size_t max_cells = std::size_t{1} << 24);

enum class ExportFormat { binary, contour_text };
ExportFormat parse_export_format(const std::string& name);
void export_snapshot(const PhaseField& field, const std::filesystem::path& path, ExportFormat format,
                     double hbar, const std::string& backend = "export",
                     const std::string& config_digest = "");

std::string report_json(const CompareResult& result, const RunConfig& config);
std::string sweep_json(const SweepResult& result);
std::string convergence_json(const ConvergenceReport& report);
std::string lyapunov_json(const LyapunovEstimate& estimate, const RunConfig& config);

}  // namespace qcc
