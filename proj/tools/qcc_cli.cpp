// Command-line front end: one subcommand per pipeline. Exit status is 0 for
// a fully clean run, 1 when a run aborted or a check failed, 2 for bad
// input.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcc/classical.hpp"
#include "qcc/config.hpp"
#include "qcc/io.hpp"
#include "qcc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qcc;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out = "qcc-out";
  std::optional<std::uint64_t> seed;
  std::string backend = "grid";
  std::size_t jobs = 1;
};

RunConfig load_config(const CommonOptions& o) {
  if (!o.config_path.empty() && !o.preset.empty()) {
    throw ConfigError("give either --config or --preset, not both");
  }
  if (o.config_path.empty() && o.preset.empty()) throw ConfigError("one of --config or --preset is required");
  RunConfig c = o.config_path.empty() ? preset_config(o.preset) : parse_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  c.validate();
  return c;
}

ClassicalBackend classical_backend(const std::string& name) {
  if (name == "grid") return ClassicalBackend::grid;
  if (name == "ensemble") return ClassicalBackend::ensemble;
  throw ConfigError("unknown classical backend '" + name + "' (grid, ensemble)");
}

void print_run(const BackendResult& r) {
  std::printf("%s: %zu records", r.name.c_str(), r.moments.size());
  if (!r.moments.empty()) std::printf(", final t = %.6g, <x> = %.9g", r.moments.back().t, r.moments.back().mean_x);
  std::printf("\n");
  for (const std::string& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
  if (r.failure) std::printf("  FAILED %s\n", r.failure->c_str());
}

int single_run(const CommonOptions& o, const std::function<BackendResult(const RunConfig&)>& run) {
  const RunConfig c = load_config(o);
  const BackendResult r = run(c);
  write_run_artifacts(o.out, c, {&r});
  print_run(r);
  return r.clean() ? 0 : 1;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_backend = false, bool with_jobs = false) {
  cmd->add_option("--config", o.config_path, "run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "built-in configuration")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed override");
  if (with_backend) {
    cmd->add_option("--backend", o.backend, "classical backend")
        ->check(CLI::IsMember({"grid", "ensemble"}))
        ->capture_default_str();
  }
  if (with_jobs) cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-classical correspondence simulator"};
  app.set_version_flag("--version", std::string("qcc ") + QCC_VERSION);
  app.require_subcommand(1);
  CommonOptions o;

  auto* quantum = app.add_subcommand("run-quantum", "evolve the Wigner master equation");
  add_common(quantum, o);
  auto* classical = app.add_subcommand("run-classical", "evolve the classical distribution");
  add_common(classical, o, true);
  auto* schrodinger = app.add_subcommand("run-schrodinger", "evolve the wave function (D = 0)");
  add_common(schrodinger, o);
  auto* ensemble = app.add_subcommand("run-ensemble", "evolve a Langevin ensemble");
  add_common(ensemble, o);

  auto* compare = app.add_subcommand("compare", "quantum vs classical comparison report");
  add_common(compare, o, true, true);
  bool with_schrodinger = false;
  bool with_ensemble = false;
  compare->add_flag("--schrodinger", with_schrodinger, "also run the Schrodinger backend");
  compare->add_flag("--ensemble", with_ensemble, "also run the ensemble backend");

  auto* sweep = app.add_subcommand("sweep", "divergence-time sweep");
  add_common(sweep, o, true, true);
  std::string axis = "initialCondition";
  std::vector<double> values;
  std::optional<std::size_t> count;
  sweep->add_option("--axis", axis, "hbar, D or initialCondition")->capture_default_str();
  sweep->add_option("--values", values, "values for hbar or D sweeps")->delimiter(',');
  sweep->add_option("--count", count, "number of sampled initial conditions");

  auto* lyapunov = app.add_subcommand("lyapunov", "Benettin finite-time Lyapunov exponent");
  add_common(lyapunov, o);

  auto* converge = app.add_subcommand("converge", "temporal and spatial refinement check");
  add_common(converge, o);
  std::string dynamics = "quantum";
  converge->add_option("--dynamics", dynamics, "quantum or classical")
      ->check(CLI::IsMember({"quantum", "classical"}))
      ->capture_default_str();

  auto* exporter = app.add_subcommand("export", "convert a binary snapshot");
  std::string input;
  std::string format = "contour-text";
  std::optional<double> hbar;
  exporter->add_option("input", input, "snapshot file")->required()->check(CLI::ExistingFile);
  exporter->add_option("--format", format, "binary or contour-text")
      ->check(CLI::IsMember({"binary", "contour-text"}))
      ->capture_default_str();
  exporter->add_option("--hbar", hbar, "hbar for the reference box (else from --config/--preset)");
  add_common(exporter, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*quantum) return single_run(o, run_quantum);
    if (*schrodinger) return single_run(o, run_schrodinger);
    if (*ensemble) return single_run(o, run_ensemble);
    if (*classical) {
      const ClassicalBackend b = classical_backend(o.backend);
      return single_run(o, [b](const RunConfig& c) { return run_classical(c, b); });
    }

    if (*compare) {
      RunConfig c = load_config(o);
      if (compare->count("--backend")) c.compare_classical = classical_backend(o.backend);
      c.compare_schrodinger = c.compare_schrodinger || with_schrodinger;
      c.compare_ensemble = c.compare_ensemble || with_ensemble;
      const CompareResult r = run_compare(c, o.out, o.jobs);
      for (const BackendResult& b : r.runs) print_run(b);
      const double T = c.period();
      if (r.report.divergence_time) {
        std::printf("divergence time %.6g (%.4g T)\n", *r.report.divergence_time, *r.report.divergence_time / T);
      } else {
        std::printf("no divergence detected\n");
      }
      if (r.report.saturated_discrepancy) {
        std::printf("saturated discrepancy %.4g of rms <x>\n", *r.report.saturated_discrepancy);
      }
      for (const SnapshotComparison& s : r.report.snapshots) {
        std::printf("t = %.4g T: L1 = %.4g, negativity %.4g (quantum) %.4g (classical)\n", s.t / T,
                    s.distance.l1, s.negativity_quantum, s.negativity_classical);
      }
      if (r.chi) std::printf("chi %.4g (excluded mass %.3g)\n", r.chi->chi, r.chi->excluded_mass);
      for (const std::string& f : r.failures) std::printf("FAILED %s\n", f.c_str());
      return r.clean() ? 0 : 1;
    }

    if (*sweep) {
      RunConfig c = load_config(o);
      if (!values.empty()) c.sweep.values = values;
      if (count) c.sweep.count = *count;
      if (sweep->count("--backend")) c.sweep.classical = classical_backend(o.backend);
      const SweepResult r = run_sweep(c, parse_sweep_axis(axis), o.out, o.jobs);
      bool clean = true;
      for (const SweepRow& row : r.rows) {
        std::printf("value %.6g (x0 %.4g, p0 %.4g): divergence ", row.value, row.x0, row.p0);
        if (row.divergence_time) {
          std::printf("%.6g", *row.divergence_time);
        } else {
          std::printf("none");
        }
        std::printf(", lambda %.4g, t_hbar %.4g%s\n", row.lambda, row.prediction.t_hbar,
                    row.prediction.valid ? "" : " (invalid)");
        if (row.failure) {
          std::printf("  FAILED %s\n", row.failure->c_str());
          clean = false;
        }
      }
      if (r.mean_divergence) {
        std::printf("divergence min/mean/max %.6g %.6g %.6g\n", *r.min_divergence, *r.mean_divergence,
                    *r.max_divergence);
      }
      return clean ? 0 : 1;
    }

    if (*lyapunov) {
      const RunConfig c = load_config(o);
      const auto potential = c.potential();
      const LyapunovEstimate e =
          benettin_lyapunov(*potential, c.initial, c.diffusion, c.dt(), c.lyapunov_horizon_periods * c.period(),
                            c.lyapunov_trajectories, c.seed, c.lyapunov);
      write_run_artifacts(o.out, c, {});
      write_text_file(fs::path(o.out) / "lyapunov.json", lyapunov_json(e, c));
      write_checksums(o.out);
      std::printf("lambda mean %.6g, stddev %.4g, standard error %.4g over %zu trajectories (%zu excluded)\n",
                  e.mean, e.stddev, e.standard_error(), e.per_trajectory.size(), e.excluded);
      return 0;
    }

    if (*converge) {
      const RunConfig c = load_config(o);
      const ConvergenceReport r =
          convergence_check(c, dynamics == "quantum" ? Dynamics::quantum : Dynamics::classical);
      write_run_artifacts(o.out, c, {});
      write_text_file(fs::path(o.out) / "convergence.json", convergence_json(r));
      write_checksums(o.out);
      std::printf("<x>(%.6g): %.12g (dt) %.12g (dt/2) %.12g (dt/4)\n", r.t, r.x_base, r.x_half, r.x_quarter);
      std::printf("temporal delta %.3g, order %.3g\n", r.temporal_delta, r.order);
      if (r.spatial_delta) std::printf("spatial delta %.3g\n", *r.spatial_delta);
      for (const std::string& n : r.notes) std::printf("note: %s\n", n.c_str());
      std::printf("%s%s\n", r.passed ? "converged" : "NOT converged", r.truncated ? " (truncated)" : "");
      return r.passed && !r.truncated ? 0 : 1;
    }

    if (*exporter) {
      const Snapshot s = read_snapshot(input);
      const ExportFormat f = parse_export_format(format);
      double h = 0.0;
      if (hbar) {
        h = *hbar;
      } else if (!o.config_path.empty() || !o.preset.empty()) {
        h = load_config(o).hbar;
      } else if (f == ExportFormat::contour_text) {
        throw ConfigError("contour-text export needs --hbar, --config or --preset");
      }
      export_snapshot(s.field, o.out, f, h, s.header.backend, s.header.config_digest);
      std::printf("wrote %s\n", o.out.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return 1;
  }
  return 2;
}
