#include "qcc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <thread>

#include <json.hpp>

#include "qcc/classical.hpp"
#include "qcc/io.hpp"
#include "qcc/phase_space.hpp"
#include "qcc/quantum.hpp"
#include "qcc/rng.hpp"

namespace qcc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Mass allowed in the outer 5% band before the periodic wrap is considered
// to have contaminated the run.
constexpr double kBoundaryMargin = 0.05;
constexpr double kBoundaryLimit = 1e-6;
// Nonnegativity budget for the classical grid; exceeding it is reported but
// does not abort (see README).
constexpr double kRingingBudget = 1e-6;

struct Event {
  std::size_t step = 0;
  bool output = false;
  bool snapshot = false;
};

std::vector<Event> make_schedule(const RunConfig& c) {
  const std::size_t total = c.total_steps();
  std::map<std::size_t, Event> events;
  for (std::size_t s = 0; s <= total; s += c.output_every) events[s].output = true;
  events[total].output = true;
  for (std::size_t s : c.snapshot_steps()) {
    if (s <= total) events[s].snapshot = true;
  }
  std::vector<Event> out;
  for (auto& [step, e] : events) {
    e.step = step;
    out.push_back(e);
  }
  return out;
}

double step_time(std::size_t step, double dt) { return static_cast<double>(step) * dt; }

std::string format_failure(const std::string& what, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t = %.9g: ", t);
  return buf + what;
}

// Drives one backend through the schedule. `advance(n)` takes n steps,
// `record(t)` and `snapshot(t)` observe the state at stamp t.
void run_schedule(const RunConfig& c, BackendResult& r, const std::function<void(std::size_t)>& advance,
                  const std::function<void(double)>& record, const std::function<void(double)>& snapshot) {
  const double dt = c.dt();
  std::size_t current = 0;
  try {
    for (const Event& e : make_schedule(c)) {
      if (e.step > current) {
        advance(e.step - current);
        current = e.step;
      }
      const double t = step_time(current, dt);
      if (e.output) record(t);
      if (e.snapshot) snapshot(t);
    }
  } catch (const NumericalError& err) {
    r.failure = format_failure(err.what(), step_time(current, dt));
  } catch (const ConfigError& err) {
    r.failure = format_failure(err.what(), step_time(current, dt));
  }
}

void check_boundary(BackendResult& r, double mass) {
  r.max_boundary_mass = std::max(r.max_boundary_mass, mass);
  if (mass > kBoundaryLimit) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "boundary mass %.3g exceeds %.0e", mass, kBoundaryLimit);
    throw NumericalError(buf);
  }
}

BackendResult run_phase_space(const RunConfig& c, Dynamics dynamics, const std::string& name) {
  c.validate();
  BackendResult r;
  r.name = name;
  const auto potential = c.potential();
  PhaseField f = gaussian_phase_field(c.initial, c.x_grid.build(), c.p_grid.build());
  PhaseSpaceEvolver evolver(f.x_axis, f.p_axis, *potential, c.evolver_settings(), dynamics,
                            c.kernel_mode);
  const double dt = c.dt();
  std::size_t steps_done = 0;
  run_schedule(
      c, r,
      [&](std::size_t n) {
        evolver.advance(f, n);
        steps_done += n;
        f.time = step_time(steps_done, dt);
      },
      [&](double t) {
        check_boundary(r, boundary_mass(f, kBoundaryMargin));
        r.moments.push_back(compute_moments(f, *potential, t));
        if (dynamics == Dynamics::classical) r.max_ringing = std::max(r.max_ringing, ringing_ratio(f));
      },
      [&](double) { r.snapshots.push_back(f); });
  if (r.max_ringing > kRingingBudget) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "negative lobes reached %.3g of the maximum (budget %.0e)",
                  r.max_ringing, kRingingBudget);
    r.warnings.emplace_back(buf);
  }
  r.final_field = std::move(f);
  return r;
}

}  // namespace

const PhaseField* BackendResult::snapshot_at(double t) const {
  for (const PhaseField& s : snapshots) {
    if (std::abs(s.time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return &s;
  }
  return nullptr;
}

BackendResult run_quantum(const RunConfig& config) {
  return run_phase_space(config, Dynamics::quantum, "master");
}

BackendResult run_schrodinger(const RunConfig& c) {
  c.validate();
  if (c.diffusion != 0.0) throw ConfigError("the schrodinger backend requires noise.D = 0");
  BackendResult r;
  r.name = "schrodinger";
  const auto potential = c.potential();
  ComplexField psi = gaussian_packet(c.initial, c.x_grid.build(), c.hbar);
  const AxisGrid p_axis = c.p_grid.build();
  SchrodingerEvolver evolver(psi.axis, *potential, c.evolver_settings());
  const double dt = c.dt();
  std::size_t steps_done = 0;
  run_schedule(
      c, r,
      [&](std::size_t n) {
        evolver.advance(psi, n);
        steps_done += n;
        psi.time = step_time(steps_done, dt);
        for (const Complex& z : psi.values) {
          if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw NumericalError("non-finite wave function");
          }
        }
      },
      [&](double t) {
        check_boundary(r, position_boundary_mass(psi, kBoundaryMargin));
        r.moments.push_back(compute_moments(psi, *potential, c.hbar, t));
      },
      [&](double t) {
        PhaseField w = wigner_transform(psi, p_axis, c.hbar);
        w.time = t;
        r.snapshots.push_back(std::move(w));
      });
  r.final_wave = std::move(psi);
  return r;
}

BackendResult run_classical(const RunConfig& c, ClassicalBackend backend) {
  if (backend == ClassicalBackend::grid) return run_phase_space(c, Dynamics::classical, "grid");
  c.validate();
  BackendResult r;
  r.name = "ensemble";
  const auto potential = c.potential();
  const AxisGrid x_axis = c.x_grid.build();
  const AxisGrid p_axis = c.p_grid.build();
  ParticleEnsemble e = sample_gaussian_ensemble(c.initial, c.ensemble_count, c.seed);
  if (e.mean_outlier) {
    r.mean_outlier = true;
    r.warnings.emplace_back("initial sample mean lies more than 4 standard errors from x0");
  }
  const double dt = c.dt();
  run_schedule(
      c, r,
      [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
          langevin_step(e, *potential, c.diffusion, dt, step_time(e.step_index, dt));
        }
        e.time = step_time(e.step_index, dt);
      },
      [&](double t) {
        // Particles are not periodic; the fraction outside the box only
        // matters for histograms, so it is tracked but never fatal.
        std::size_t outside = 0;
        for (std::size_t i = 0; i < e.size(); ++i) {
          if (!std::isfinite(e.x[i]) || !std::isfinite(e.p[i])) throw NumericalError("non-finite particle");
          if (e.x[i] < x_axis.minimum() || e.x[i] >= x_axis.maximum() || e.p[i] < p_axis.minimum() ||
              e.p[i] >= p_axis.maximum()) {
            ++outside;
          }
        }
        r.max_boundary_mass = std::max(r.max_boundary_mass,
                                       static_cast<double>(outside) / static_cast<double>(e.size()));
        r.moments.push_back(compute_moments(e, *potential, t));
      },
      [&](double t) {
        PhaseField h = ensemble_histogram(e, x_axis, p_axis);
        h.time = t;
        r.snapshots.push_back(std::move(h));
      });
  if (r.max_boundary_mass > 0.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "up to %.3g of the particles left the grid box", r.max_boundary_mass);
    r.warnings.emplace_back(buf);
  }
  PhaseField last = ensemble_histogram(e, x_axis, p_axis);
  last.time = e.time;
  r.final_field = std::move(last);
  return r;
}

namespace {

std::string step_label(double t, double dt) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%09lld", static_cast<long long>(std::llround(t / dt)));
  return buf;
}

void write_header_files(const fs::path& dir, const RunConfig& config) {
  fs::create_directories(dir);
  write_text_file(dir / "config.txt", write_config(config));
  write_text_file(dir / "version.txt", std::string("qcc ") + QCC_VERSION + "\n");
}

void write_failures(const fs::path& dir, const std::vector<const BackendResult*>& runs) {
  json failures = json::array();
  for (const BackendResult* r : runs) {
    if (!r->failure) continue;
    failures.push_back({{"backend", r->name},
                        {"message", *r->failure},
                        {"records", r->moments.size()},
                        {"last_time", r->moments.empty() ? 0.0 : r->moments.back().t}});
  }
  const fs::path path = dir / "failure.json";
  if (failures.empty()) {
    fs::remove(path);
    return;
  }
  write_text_file(path, json{{"failures", failures}}.dump(2) + "\n");
}

// Moment series of two backends cut to their common prefix, so a run that
// aborted early can still be compared up to the abort.
std::pair<std::span<const MomentRecord>, std::span<const MomentRecord>> aligned(const BackendResult& a,
                                                                                const BackendResult& b) {
  const std::size_t n = std::min(a.moments.size(), b.moments.size());
  return {std::span(a.moments).first(n), std::span(b.moments).first(n)};
}

// Chi from the x density of the final quantum state.
std::optional<ChiEstimate> final_chi(const BackendResult& r, const PotentialModel& potential,
                                     double cutoff) {
  if (r.final_field) {
    return chi_estimate(*r.final_field, potential, r.final_field->time, cutoff);
  }
  if (r.final_wave) {
    const ComplexField& psi = *r.final_wave;
    std::vector<double> density(psi.values.size());
    for (std::size_t j = 0; j < density.size(); ++j) density[j] = std::norm(psi.values[j]);
    return chi_estimate(density, psi.axis, potential, psi.time, cutoff);
  }
  return std::nullopt;
}

// Runs the tasks on up to `jobs` threads; results stay in task order.
template <class T>
std::vector<T> run_jobs(const std::vector<std::function<T()>>& tasks, std::size_t jobs) {
  std::vector<T> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(tasks.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace

void write_checksums(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir);
    if (rel == "checksums.txt") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  std::string text;
  for (const fs::path& rel : files) {
    text += hex64(file_checksum(dir / rel)) + "  " + rel.generic_string() + "\n";
  }
  write_text_file(dir / "checksums.txt", text);
}

void write_run_artifacts(const fs::path& dir, const RunConfig& config,
                         const std::vector<const BackendResult*>& runs) {
  write_header_files(dir, config);
  const std::string digest = config_digest(config);
  const double dt = config.dt();
  for (const BackendResult* r : runs) {
    write_moments_csv(dir / ("moments_" + r->name + ".csv"), r->moments);
    if (!r->snapshots.empty()) fs::create_directories(dir / "snapshots");
    for (const PhaseField& s : r->snapshots) {
      write_snapshot(dir / "snapshots" / (r->name + "_" + step_label(s.time, dt) + ".snap"), s, r->name,
                     digest);
    }
  }
  write_failures(dir, runs);
  write_checksums(dir);
}

const BackendResult* CompareResult::find(const std::string& name) const {
  for (const BackendResult& r : runs) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

CompareResult run_compare(const RunConfig& c, const fs::path& out, std::size_t jobs) {
  c.validate();
  const bool want_schrodinger = c.compare_schrodinger || c.compare_quantum == QuantumBackend::schrodinger;
  const bool want_ensemble = c.compare_ensemble || c.compare_classical == ClassicalBackend::ensemble;
  if (want_schrodinger && c.diffusion != 0.0) {
    throw ConfigError("compare: the schrodinger backend requires noise.D = 0");
  }
  std::vector<std::function<BackendResult()>> tasks = {
      [&] { return run_quantum(c); },
      [&] { return run_classical(c, ClassicalBackend::grid); },
  };
  if (want_schrodinger) tasks.emplace_back([&] { return run_schrodinger(c); });
  if (want_ensemble) tasks.emplace_back([&] { return run_classical(c, ClassicalBackend::ensemble); });

  CompareResult result;
  result.runs = run_jobs(tasks, jobs);
  result.quantum_name = to_string(c.compare_quantum);
  result.classical_name = to_string(c.compare_classical);
  const BackendResult& q = *result.find(result.quantum_name);
  const BackendResult& k = *result.find(result.classical_name);
  for (const BackendResult& r : result.runs) {
    if (r.failure) result.failures.push_back(r.name + ": " + *r.failure);
  }

  const auto [qs, ks] = aligned(q, k);
  result.report = compare_series(qs, ks, c.divergence);
  const double period = c.period();
  if (!result.report.t.empty() && result.report.t.back() >= 8.0 * period * (1.0 - 1e-12)) {
    result.late_mean_abs_delta_x = mean_abs_delta_x(result.report, 4.0 * period, 8.0 * period);
  }
  for (const PhaseField& s : q.snapshots) {
    const PhaseField* other = k.snapshot_at(s.time);
    if (!other) continue;
    SnapshotComparison cmp;
    cmp.t = s.time;
    cmp.distance = distribution_distance(s, *other);
    cmp.negativity_quantum = wigner_negativity(s);
    cmp.negativity_classical = wigner_negativity(*other);
    result.report.snapshots.push_back(cmp);
  }
  const auto potential = c.potential();
  try {
    result.chi = final_chi(q, *potential, c.chi_cutoff);
  } catch (const NumericalError& err) {
    // Potentials without a cubic force term have no defined chi.
    result.chi_note = err.what();
  }

  if (!out.empty()) {
    std::vector<const BackendResult*> runs;
    for (const BackendResult& r : result.runs) runs.push_back(&r);
    write_run_artifacts(out, c, runs);
    std::string table = "t,absDeltaX,absDeltaP\n";
    char buf[96];
    for (std::size_t i = 0; i < result.report.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", result.report.t[i],
                    result.report.abs_delta_x[i], result.report.abs_delta_p[i]);
      table += buf;
    }
    write_text_file(out / "comparison.csv", table);
    write_text_file(out / "report.json", report_json(result, c));
    write_checksums(out);
  }
  return result;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "hbar") return SweepAxis::hbar;
  if (name == "D" || name == "diffusion") return SweepAxis::diffusion;
  if (name == "initialCondition" || name == "initial-condition") return SweepAxis::initial_condition;
  throw ConfigError("unknown sweep axis '" + name + "' (hbar, D, initialCondition)");
}

std::vector<std::pair<double, double>> sample_initial_conditions(const RunConfig& c,
                                                                 std::size_t* attempts) {
  c.validate();
  const SweepSettings& s = c.sweep;
  const auto potential = c.potential();
  const Polynomial u = potential->static_polynomial();
  const double m = potential->mass();
  const double horizon = s.screen_periods * c.period();
  std::vector<std::pair<double, double>> kept;
  std::size_t n = 0;
  for (; n < s.max_attempts && kept.size() < s.count; ++n) {
    const ParticleStream stream(c.seed, n);
    const double x0 = s.x_min + (s.x_max - s.x_min) * stream.uniform(0, stream_tag::sweep);
    const double p0 = s.p_min + (s.p_max - s.p_min) * stream.uniform(1, stream_tag::sweep);
    const double energy = p0 * p0 / (2.0 * m) + u(x0);
    if (energy < s.energy_min || energy > s.energy_max) continue;
    const double lambda =
        trajectory_lyapunov(*potential, x0, p0, c.dt(), horizon, c.lyapunov.renorm_interval);
    if (lambda >= s.lambda_min) kept.emplace_back(x0, p0);
  }
  if (attempts) *attempts = n;
  if (kept.size() < s.count) {
    throw ConfigError("initial-condition sampler kept " + std::to_string(kept.size()) + " of " +
                      std::to_string(s.count) + " packets after " + std::to_string(n) + " attempts");
  }
  return kept;
}

namespace {

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

SweepRow sweep_run(const RunConfig& c, double value) {
  SweepRow row;
  row.value = value;
  row.x0 = c.initial.x0;
  row.p0 = c.initial.p0;
  try {
    // Pure-state propagation cannot carry the diffusion term, so D > 0 runs
    // fall back to the master equation.
    const bool schrodinger = c.sweep.quantum == QuantumBackend::schrodinger && c.diffusion == 0.0;
    const BackendResult q = schrodinger ? run_schrodinger(c) : run_quantum(c);
    const BackendResult k = run_classical(c, c.sweep.classical);
    const auto [qs, ks] = aligned(q, k);
    const ComparisonReport report = compare_series(qs, ks, c.divergence);
    row.divergence_time = report.divergence_time;
    row.saturated_discrepancy = report.saturated_discrepancy;
    if (q.failure) row.failure = q.name + ": " + *q.failure;
    if (k.failure) row.failure = k.name + ": " + *k.failure;

    const auto potential = c.potential();
    const LyapunovEstimate lyap = benettin_lyapunov(
        *potential, c.initial, c.diffusion, c.dt(), c.lyapunov_horizon_periods * c.period(),
        c.lyapunov_trajectories, c.seed, c.lyapunov);
    row.lambda = lyap.mean;
    try {
      if (const auto chi = final_chi(q, *potential, c.chi_cutoff)) row.chi = chi->chi;
    } catch (const NumericalError&) {
      // No cubic force term: chi and the prediction stay undefined.
    }
    if (row.lambda > 0.0 && row.chi > 0.0) {
      row.prediction = break_time(row.lambda, row.chi, std::sqrt(c.initial.var_p), c.hbar);
    }
  } catch (const std::exception& err) {
    row.failure = err.what();
  }
  return row;
}

}  // namespace

SweepResult run_sweep(const RunConfig& c, SweepAxis axis, const fs::path& out, std::size_t jobs) {
  c.validate();
  SweepResult result;
  result.axis = axis;
  std::vector<RunConfig> configs;
  std::vector<double> values;
  if (axis == SweepAxis::initial_condition) {
    const auto centres = sample_initial_conditions(c, &result.attempts);
    for (std::size_t i = 0; i < centres.size(); ++i) {
      RunConfig rc = c;
      rc.initial.x0 = centres[i].first;
      rc.initial.p0 = centres[i].second;
      configs.push_back(rc);
      values.push_back(static_cast<double>(i));
    }
  } else {
    if (c.sweep.values.empty()) throw ConfigError("sweep.values must list at least one value");
    for (double v : c.sweep.values) {
      RunConfig rc = c;
      if (axis == SweepAxis::hbar) {
        // Keep the packet minimum-uncertainty with the original aspect ratio.
        const double scale = v / c.hbar;
        rc.hbar = v;
        rc.initial.var_x *= scale;
        rc.initial.var_p *= scale;
        rc.initial.cov_xp *= scale;
      } else {
        rc.diffusion = v;
      }
      rc.validate();
      configs.push_back(rc);
      values.push_back(v);
    }
  }

  std::vector<std::function<SweepRow()>> tasks;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    tasks.emplace_back([&, i] { return sweep_run(configs[i], values[i]); });
  }
  result.rows = run_jobs(tasks, jobs);

  std::vector<double> times;
  for (const SweepRow& r : result.rows) {
    if (r.divergence_time) times.push_back(*r.divergence_time);
  }
  if (!times.empty()) {
    result.min_divergence = *std::min_element(times.begin(), times.end());
    result.max_divergence = *std::max_element(times.begin(), times.end());
    result.mean_divergence = compensated_sum(times) / static_cast<double>(times.size());
  }

  if (!out.empty()) {
    write_header_files(out, c);
    std::string table = "value,x0,p0,divergenceTime,saturatedDiscrepancy,lambda,chi,tHbar,tHbarValid,failure\n";
    char buf[256];
    for (const SweepRow& r : result.rows) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", r.value, r.x0, r.p0);
      table += buf + csv_number(r.divergence_time) + "," + csv_number(r.saturated_discrepancy) + ",";
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,", r.lambda, r.chi, r.prediction.t_hbar,
                    r.prediction.valid ? 1 : 0);
      table += buf;
      if (r.failure) {
        std::string f = *r.failure;
        std::replace(f.begin(), f.end(), ',', ';');
        table += f;
      }
      table += '\n';
    }
    write_text_file(out / "sweep.csv", table);
    write_text_file(out / "sweep.json", sweep_json(result));
    write_checksums(out);
  }
  return result;
}

namespace {

double final_mean_x(const RunConfig& c, Dynamics dynamics, std::vector<std::string>& notes) {
  const auto potential = c.potential();
  PhaseField f = gaussian_phase_field(c.initial, c.x_grid.build(), c.p_grid.build());
  PhaseSpaceEvolver evolver(f.x_axis, f.p_axis, *potential, c.evolver_settings(), dynamics,
                            c.kernel_mode);
  evolver.advance(f, c.total_steps());
  const double edge = boundary_mass(f, kBoundaryMargin);
  if (edge > kBoundaryLimit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zux%zu, %zu steps per period: boundary mass %.3g", f.nx(), f.np(),
                  c.steps_per_period, edge);
    notes.emplace_back(buf);
  }
  return compute_moments(f, *potential, step_time(c.total_steps(), c.dt())).mean_x;
}

}  // namespace

ConvergenceReport convergence_check(const RunConfig& config, Dynamics dynamics, std::size_t max_cells) {
  config.validate();
  RunConfig base = config;
  base.periods = config.converge_periods;
  base.snapshot_periods.clear();
  base.validate();

  ConvergenceReport rep;
  rep.dynamics = dynamics;
  rep.t = step_time(base.total_steps(), base.dt());
  rep.tolerance = config.converge_tolerance;

  rep.x_base = final_mean_x(base, dynamics, rep.notes);
  RunConfig half = base;
  half.steps_per_period *= 2;
  rep.x_half = final_mean_x(half, dynamics, rep.notes);
  RunConfig quarter = base;
  quarter.steps_per_period *= 4;
  rep.x_quarter = final_mean_x(quarter, dynamics, rep.notes);

  rep.temporal_delta = std::abs(rep.x_half - rep.x_base);
  rep.order = std::log2(std::abs(rep.x_base - rep.x_half) / std::abs(rep.x_half - rep.x_quarter));

  RunConfig fine = base;
  fine.x_grid.count *= 2;
  fine.p_grid.count *= 2;
  if (fine.x_grid.count * fine.p_grid.count > max_cells) {
    rep.truncated = true;
    rep.notes.emplace_back("grid doubling skipped: " + std::to_string(fine.x_grid.count) + "x" +
                           std::to_string(fine.p_grid.count) + " exceeds the cell limit");
  } else {
    rep.x_fine = final_mean_x(fine, dynamics, rep.notes);
    rep.spatial_delta = std::abs(*rep.x_fine - rep.x_base);
  }
  rep.passed = rep.temporal_delta <= rep.tolerance &&
               (!rep.spatial_delta || *rep.spatial_delta <= rep.tolerance) && rep.notes.empty();
  return rep;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "binary") return ExportFormat::binary;
  if (name == "contour-text") return ExportFormat::contour_text;
  throw ConfigError("unknown export format '" + name + "' (binary, contour-text)");
}

void export_snapshot(const PhaseField& field, const fs::path& path, ExportFormat format, double hbar,
                     const std::string& backend, const std::string& digest) {
  if (format == ExportFormat::binary) {
    write_snapshot(path, field, backend, digest);
  } else {
    write_contour_text(path, field, hbar);
  }
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json residual_json(const BackendResult& r, const PotentialModel& potential, double diffusion) {
  try {
    const ResidualSummary s = moment_residuals(r.moments, potential, diffusion);
    json j = {{"r1_relative", s.r1_relative}, {"r2_relative", s.r2_relative}, {"r3_closed", s.r3_closed}};
    j["r3_relative"] = s.r3_closed ? json(s.r3_relative) : json(nullptr);
    return j;
  } catch (const std::exception& err) {
    return json{{"error", err.what()}};
  }
}

}  // namespace

std::string report_json(const CompareResult& result, const RunConfig& c) {
  const auto potential = c.potential();
  const double period = c.period();
  const ComparisonReport& rep = result.report;
  json j;
  j["version"] = QCC_VERSION;
  j["config_digest"] = config_digest(c);
  j["quantum"] = result.quantum_name;
  j["classical"] = result.classical_name;
  j["period"] = period;
  j["divergence"] = {{"threshold", rep.options.threshold},
                     {"debounce", rep.options.debounce},
                     {"time", optional_number(rep.divergence_time)},
                     {"time_periods", rep.divergence_time ? json(*rep.divergence_time / period) : json(nullptr)}};
  j["saturated_discrepancy"] = optional_number(rep.saturated_discrepancy);
  j["reference_rms"] = rep.reference_rms;
  j["late_mean_abs_delta_x"] = optional_number(result.late_mean_abs_delta_x);
  json snaps = json::array();
  for (const SnapshotComparison& s : rep.snapshots) {
    snaps.push_back({{"t", s.t},
                     {"t_periods", s.t / period},
                     {"l1", s.distance.l1},
                     {"l2", s.distance.l2},
                     {"negativity_quantum", s.negativity_quantum},
                     {"negativity_classical", s.negativity_classical}});
  }
  j["snapshots"] = snaps;
  if (result.chi) {
    j["chi"] = {{"value", result.chi->chi}, {"excluded_mass", result.chi->excluded_mass}};
  } else {
    j["chi"] = {{"value", nullptr}, {"note", result.chi_note}};
  }
  json backends = json::array();
  for (const BackendResult& r : result.runs) {
    json b = {{"name", r.name},
              {"records", r.moments.size()},
              {"final_time", r.moments.empty() ? 0.0 : r.moments.back().t},
              {"failure", r.failure ? json(*r.failure) : json(nullptr)},
              {"max_boundary_mass", r.max_boundary_mass},
              {"warnings", r.warnings},
              {"residuals", residual_json(r, *potential, c.diffusion)}};
    if (r.name == "grid") b["max_ringing"] = r.max_ringing;
    if (r.name == "ensemble") b["mean_outlier"] = r.mean_outlier;
    backends.push_back(b);
  }
  j["backends"] = backends;
  j["clean"] = result.clean();
  j["failures"] = result.failures;
  return j.dump(2) + "\n";
}

std::string sweep_json(const SweepResult& result) {
  static const char* names[] = {"hbar", "D", "initialCondition"};
  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    rows.push_back({{"value", r.value},
                    {"x0", r.x0},
                    {"p0", r.p0},
                    {"divergence_time", optional_number(r.divergence_time)},
                    {"saturated_discrepancy", optional_number(r.saturated_discrepancy)},
                    {"lambda", r.lambda},
                    {"chi", r.chi},
                    {"t_hbar", r.prediction.t_hbar},
                    {"t_hbar_valid", r.prediction.valid},
                    {"failure", r.failure ? json(*r.failure) : json(nullptr)}});
  }
  json j = {{"axis", names[static_cast<int>(result.axis)]},
            {"rows", rows},
            {"divergence_summary",
             {{"min", optional_number(result.min_divergence)},
              {"mean", optional_number(result.mean_divergence)},
              {"max", optional_number(result.max_divergence)}}}};
  if (result.axis == SweepAxis::initial_condition) j["attempts"] = result.attempts;
  return j.dump(2) + "\n";
}

std::string convergence_json(const ConvergenceReport& r) {
  json j = {{"dynamics", r.dynamics == Dynamics::quantum ? "quantum" : "classical"},
            {"t", r.t},
            {"x_base", r.x_base},
            {"x_half", r.x_half},
            {"x_quarter", r.x_quarter},
            {"x_fine", optional_number(r.x_fine)},
            {"temporal_delta", r.temporal_delta},
            {"spatial_delta", optional_number(r.spatial_delta)},
            {"order", std::isfinite(r.order) ? json(r.order) : json(nullptr)},
            {"tolerance", r.tolerance},
            {"truncated", r.truncated},
            {"passed", r.passed},
            {"notes", r.notes}};
  return j.dump(2) + "\n";
}

std::string lyapunov_json(const LyapunovEstimate& e, const RunConfig& c) {
  json j = {{"horizon", e.horizon},
            {"horizon_periods", e.horizon / c.period()},
            {"diffusion", c.diffusion},
            {"trajectories", e.per_trajectory.size() + e.excluded},
            {"excluded", e.excluded},
            {"mean", e.mean},
            {"stddev", e.stddev},
            {"standard_error", e.standard_error()},
            {"per_trajectory", e.per_trajectory}};
  return j.dump(2) + "\n";
}

}  // namespace qcc
