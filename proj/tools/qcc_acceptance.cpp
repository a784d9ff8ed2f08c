// Acceptance harness: one PASS/FAIL line per criterion with the measured
// values and the pinned tolerances. Long criteria run at the default
// resolution; see README for expected runtimes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qcc/analysis.hpp"
#include "qcc/classical.hpp"
#include "qcc/config.hpp"
#include "qcc/phase_space.hpp"
#include "qcc/pipeline.hpp"
#include "qcc/quantum.hpp"
#include "qcc/state.hpp"

namespace fs = std::filesystem;
using namespace qcc;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  // Records one sub-check; the criterion passes only if all of them do.
  void check(bool ok, const char* fmt, double value, double limit) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, value, limit);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      detail += " [x]";
      pass = false;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double max_abs_diff(const PhaseField& a, const PhaseField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// ---- 1 -------------------------------------------------------------------

Verdict conservation() {
  Verdict v;
  const DrivenDoubleWell well = DrivenDoubleWell::paper_regime();
  const GaussianInitialState s = GaussianInitialState::paper_instance();
  {
    const AxisGrid x = build_axis(-8, 8, 2048);
    ComplexField psi = gaussian_packet(s, x, 0.1);
    SchrodingerEvolver e(x, well, EvolverSettings::from_period(well.period(), 2048, 0.1, 0.0));
    const double n0 = psi.norm();
    double drift = 0.0;
    for (int k = 0; k < 100; ++k) {
      e.advance(psi, 100);
      drift = std::max(drift, std::abs(psi.norm() - n0));
    }
    v.check(drift < 1e-9, "norm drift over 1e4 steps %.2g (< %.0e)", drift, 1e-9);
  }
  const AxisGrid x = build_axis(-8, 8, 512), p = build_axis(-24, 24, 512);
  double worst = 0.0;
  for (double d : {0.0, 0.025}) {
    for (Dynamics dyn : {Dynamics::quantum, Dynamics::classical}) {
      PhaseField f = gaussian_phase_field(s, x, p);
      PhaseSpaceEvolver e(x, p, well, EvolverSettings::from_period(well.period(), 2048, 0.1, d), dyn);
      double mass = integrate_field(f);
      for (int k = 0; k < 200; ++k) {
        e.step(f);
        const double next = integrate_field(f);
        worst = std::max(worst, std::abs(next - mass));
        mass = next;
      }
    }
  }
  v.check(worst < 1e-10, "max mass change per step %.2g (< %.0e) over D in {0, 0.025}, 512^2", worst, 1e-10);
  return v;
}

// ---- 2 -------------------------------------------------------------------

struct Cov {
  double xx, pp, xp;
};

// Covariance of a Gaussian under the exact harmonic flow.
Cov rotate(const GaussianInitialState& s, double m, double w, double t) {
  const double c = std::cos(w * t), sn = std::sin(w * t);
  const double a = c, b = sn / (m * w), g = -m * w * sn, d = c;
  return {a * a * s.var_x + 2 * a * b * s.cov_xp + b * b * s.var_p,
          g * g * s.var_x + 2 * g * d * s.cov_xp + d * d * s.var_p,
          a * g * s.var_x + (a * d + b * g) * s.cov_xp + b * d * s.var_p};
}

Verdict harmonic_oracle() {
  Verdict v;
  const HarmonicOracle h(1.0, 4.0);
  const GaussianInitialState s{1.0, 0.5, 0.04, 0.2, 0.03};
  const AxisGrid x = build_axis(-4, 4, 128), p = build_axis(-8, 8, 128);
  // The Strang covariance error grows as periods * dt^2; T/8192 keeps 10
  // periods well inside the bound.
  const std::size_t steps = 8192;
  const EvolverSettings set = EvolverSettings::from_period(h.period(), steps, 0.1, 0.0);
  PhaseField q = gaussian_phase_field(s, x, p), c = q;
  PhaseSpaceEvolver eq(x, p, h, set, Dynamics::quantum);
  PhaseSpaceEvolver ec(x, p, h, set, Dynamics::classical);
  double linf = 0.0, cov = 0.0;
  for (int k = 0; k < 40; ++k) {
    eq.advance(q, steps / 4);
    ec.advance(c, steps / 4);
    linf = std::max(linf, max_abs_diff(q, c));
    for (const PhaseField* f : {&q, &c}) {
      const MomentRecord m = compute_moments(*f, h, f->time);
      const Cov r = rotate(s, 1.0, h.angular_frequency(), f->time);
      cov = std::max({cov, std::abs(m.central_x2 - r.xx), std::abs(m.central_p2 - r.pp),
                      std::abs(m.cross_xp - r.xp)});
    }
  }
  v.check(linf < 1e-8, "master vs Fokker-Planck L-inf %.2g (< %.0e) over 10 periods", linf, 1e-8);
  v.check(cov < 1e-6, "covariance error %.2g (< %.0e)", cov, 1e-6);
  return v;
}

// ---- 4 and the V = 0 half of 5 ---------------------------------------------

RunConfig free_diffusion_config() {
  RunConfig c;
  c.potential_kind = PotentialKind::free;
  c.mass = 1.0;
  c.reference_period = 10.0;
  c.hbar = 0.1;
  c.diffusion = 0.025;
  c.initial = GaussianInitialState{0.0, 0.0, 0.1, 0.1, 0.0};
  c.periods = 1.0;
  c.steps_per_period = 1000;
  c.output_every = 10;
  c.x_grid = {-40.0, 40.0, 1024};
  c.p_grid = {-8.0, 8.0, 256};
  c.ensemble_count = 100000;
  c.seed = 4;
  c.validate();
  return c;
}

struct FreeRuns {
  BackendResult grid;
  BackendResult ensemble;
};

Verdict diffusion_law(const FreeRuns& r, double d, double t) {
  Verdict v;
  const double want = 2.0 * d * t;
  if (!r.grid.clean() || !r.ensemble.clean()) {
    v.pass = false;
    v.note("run failed: " + r.grid.failure.value_or("") + r.ensemble.failure.value_or(""));
    return v;
  }
  const double g = r.grid.moments.back().central_p2 - r.grid.moments.front().central_p2;
  v.check(std::abs(g / want - 1.0) < 0.01, "grid dVar_p/(2Dt) - 1 = %.2g (|.| < %.2f)", g / want - 1.0, 0.01);
  const double v0 = r.ensemble.moments.front().central_p2;
  const double e = r.ensemble.moments.back().central_p2 - v0;
  const double n = 100000.0;
  // Sample-variance increment 2 cov(p0, W) + var(W), W ~ N(0, 2Dt).
  const double se = std::sqrt((4.0 * v0 * want + 2.0 * want * want) / n);
  v.check(std::abs(e - want) < 3.0 * se, "ensemble |dVar_p - 2Dt| = %.2g (< 3 s.e. = %.2g)", std::abs(e - want),
          3.0 * se);
  return v;
}

// ---- 5 -------------------------------------------------------------------

Verdict moment_hierarchy(const CompareResult& fig1, const FreeRuns& free, const RunConfig& fig1_config,
                         double d) {
  Verdict v;
  const auto potential = fig1_config.potential();
  for (const char* name : {"master", "grid"}) {
    const BackendResult* b = fig1.find(name);
    if (!b || b->moments.size() < 5) {
      v.pass = false;
      v.note(std::string(name) + " run missing");
      continue;
    }
    const ResidualSummary s = moment_residuals(b->moments, *potential, 0.0);
    v.check(s.r1_relative < 1e-3, (std::string(name) + " r1 %.2g (< %.0e)").c_str(), s.r1_relative, 1e-3);
    v.check(s.r2_relative < 1e-3, (std::string(name) + " r2 %.2g (< %.0e)").c_str(), s.r2_relative, 1e-3);
  }
  const FreeParticle zero(1.0, 10.0);
  const ResidualSummary s = moment_residuals(free.grid.moments, zero, d);
  double worst = 0.0;
  for (const MomentResidual& r : s.residuals) {
    worst = std::max(worst, std::abs((r.dp2_dt + 2.0 * r.p_force) / (2.0 * d) - 1.0));
  }
  v.check(s.r3_closed && worst < 0.02, "V = 0 source recovery max |src/2D - 1| %.2g (< %.2f)", worst, 0.02);
  return v;
}

// ---- 6 -------------------------------------------------------------------

Verdict lyapunov(const RunConfig& fig1) {
  Verdict v;
  const auto potential = fig1.potential();
  const double horizon = 50.0 * fig1.period();
  const LyapunovEstimate e0 =
      benettin_lyapunov(*potential, fig1.initial, 0.0, fig1.dt(), horizon, 100, fig1.seed, fig1.lyapunov);
  const LyapunovEstimate e1 =
      benettin_lyapunov(*potential, fig1.initial, 0.025, fig1.dt(), horizon, 100, fig1.seed, fig1.lyapunov);
  const bool in_range = e0.mean >= 0.35 && e0.mean <= 0.55;
  v.check(in_range, "D = 0 mean lambda %.4g (in [0.35, %.2f])", e0.mean, 0.55);
  const double half = 1.96 * e0.standard_error();
  v.check(std::abs(e1.mean - e0.mean) <= half, "D = 0.025 offset %.3g (|.| <= 95%% half-width %.3g)",
          e1.mean - e0.mean, half);
  v.note(fmt("D = 0.025 mean %.4g", e1.mean) + fmt(", D = 0 s.e. %.3g", e0.standard_error()) +
         ", excluded " + std::to_string(e0.excluded) + "/" + std::to_string(e1.excluded));
  return v;
}

// ---- 7 -------------------------------------------------------------------

Verdict arithmetic() {
  Verdict v;
  const double t = break_time(0.45, 0.6, 1.0, 0.1).t_hbar;
  v.check(std::abs(t - 3.98) <= 0.01, "t_hbar %.4f (3.98 +- %.2f)", t, 0.01);
  const double s = coherence_scale(0.025, 0.5);
  v.check(std::abs(s - 0.316) <= 0.001, "sigma_c %.4f (0.316 +- %.3f)", s, 0.001);
  return v;
}

// ---- 3 and 8 -------------------------------------------------------------

Verdict cross_solver(const CompareResult& fig1, double period) {
  Verdict v;
  const BackendResult* m = fig1.find("master");
  const BackendResult* s = fig1.find("schrodinger");
  const PhaseField* a = m ? m->snapshot_at(2.0 * period) : nullptr;
  const PhaseField* b = s ? s->snapshot_at(2.0 * period) : nullptr;
  if (!a || !b) {
    v.pass = false;
    v.note("no 2T snapshot from both routes");
    for (const std::string& f : fig1.failures) v.note(f);
    return v;
  }
  const double l1 = distribution_distance(*a, *b).l1;
  v.check(l1 < 1e-3, "L1(W[psi], f_W) at 2T %.3g (< %.0e)", l1, 1e-3);
  return v;
}

Verdict breakdown(const CompareResult& fig1, const RunConfig& c, const SweepResult& sweep) {
  Verdict v;
  const ComparisonReport& r = fig1.report;
  if (!fig1.clean()) {
    v.pass = false;
    for (const std::string& f : fig1.failures) v.note(f);
  }
  const double limit = c.divergence.threshold * r.reference_rms;
  double early = 0.0;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    if (r.t[i] < 2.0) early = std::max(early, r.abs_delta_x[i]);
  }
  v.check(early < limit, "max |d<x>| for t < 2 %.3g (< %.3g)", early, limit);
  const double td = r.divergence_time.value_or(NAN);
  v.check(td >= 2.0 && td <= 10.0, "divergence time %.4g (in [2, %g])", td, 10.0);
  const double sat = r.saturated_discrepancy.value_or(NAN);
  v.check(sat <= 0.15, "saturated discrepancy %.3g (<= %.2f)", sat, 0.15);
  std::size_t detected = 0, failed = 0;
  for (const SweepRow& row : sweep.rows) {
    if (row.divergence_time) ++detected;
    if (row.failure) ++failed;
  }
  const double mean = sweep.mean_divergence.value_or(NAN);
  v.check(sweep.rows.size() == 10 && mean >= 2.0 && mean <= 10.0,
          "sweep mean divergence %.4g (in [2, %g])", mean, 10.0);
  v.note("sweep min/max " + fmt("%.4g", sweep.min_divergence.value_or(NAN)) + "/" +
         fmt("%.4g", sweep.max_divergence.value_or(NAN)) + ", detected " + std::to_string(detected) + "/" +
         std::to_string(sweep.rows.size()) + ", failed " + std::to_string(failed));
  return v;
}

// ---- 9 -------------------------------------------------------------------

Verdict decoherence(const CompareResult& d0, const CompareResult& d1, double period) {
  Verdict v;
  const auto pair_at = [&](const CompareResult& r) -> std::optional<SnapshotComparison> {
    for (const SnapshotComparison& s : r.report.snapshots) {
      if (std::abs(s.t - 8.0 * period) < 1e-9 * s.t) return s;
    }
    return std::nullopt;
  };
  const auto a = pair_at(d0), b = pair_at(d1);
  if (!a || !b || !d0.late_mean_abs_delta_x || !d1.late_mean_abs_delta_x) {
    v.pass = false;
    v.note("runs did not reach 8T");
    for (const std::string& f : d0.failures) v.note("D = 0 " + f);
    for (const std::string& f : d1.failures) v.note("D > 0 " + f);
    return v;
  }
  const double l1 = a->distance.l1 / b->distance.l1;
  v.check(l1 >= 5.0, "L1 ratio D=0 / D=0.025 at 8T %.3g (>= %.0f)", l1, 5.0);
  const double neg = b->negativity_quantum / a->negativity_quantum;
  v.check(neg < 0.2, "negativity ratio %.3g (< %.1f)", neg, 0.2);
  const double dx = *d0.late_mean_abs_delta_x / *d1.late_mean_abs_delta_x;
  v.check(dx >= 2.0, "mean |d<x>| [4T, 8T] ratio %.3g (>= %.0f)", dx, 2.0);
  v.note(fmt("L1 %.3g", a->distance.l1) + fmt(" vs %.3g", b->distance.l1) +
         fmt(", negativity %.3g", a->negativity_quantum) + fmt(" vs %.3g", b->negativity_quantum));
  return v;
}

// ---- 10 ------------------------------------------------------------------

Verdict convergence(const RunConfig& fig1) {
  Verdict v;
  RunConfig c = fig1;
  c.converge_periods = 1.0;
  const ConvergenceReport r = convergence_check(c, Dynamics::quantum);
  v.check(std::abs(r.order - 2.0) <= 0.3, "temporal order %.3g (2.0 +- %.1f)", r.order, 0.3);
  if (r.spatial_delta) {
    v.check(*r.spatial_delta < 1e-4, "spatial doubling |d<x>(T)| %.2g (< %.0e)", *r.spatial_delta, 1e-4);
  } else {
    v.pass = false;
    v.note("spatial doubling skipped (grid over budget)");
  }
  for (const std::string& n : r.notes) v.note(n);
  return v;
}

// ---- 11 ------------------------------------------------------------------

Verdict determinism(const fs::path& scratch) {
  Verdict v;
  RunConfig c = preset_config("harmonic");
  c.compare_ensemble = true;
  c.compare_schrodinger = true;
  const fs::path a = scratch / "det-a", b = scratch / "det-b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_compare(c, a, 1);
  run_compare(c, b, 2);
  std::size_t files = 0, differ = 0;
  const auto bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    const std::string ext = rel.extension().string();
    if (ext != ".csv" && ext != ".snap") continue;
    ++files;
    if (!fs::exists(b / rel) || bytes(entry.path()) != bytes(b / rel)) ++differ;
  }
  v.check(differ == 0 && files > 0, "%.0f of the CSV and snapshot files differ (%.0f compared)",
          static_cast<double>(differ), static_cast<double>(files));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string scratch = (fs::temp_directory_path() / "qcc-acceptance").string();
  app.add_option("--only", only, "criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 11));
  app.add_option("--scratch", scratch, "directory for the determinism runs")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  const std::set<int> chosen = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}
                                            : std::set<int>(only.begin(), only.end());
  const auto want = [&](std::initializer_list<int> ids) {
    return std::any_of(ids.begin(), ids.end(), [&](int i) { return chosen.count(i) > 0; });
  };

  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Verdict()>& run) {
    if (!chosen.count(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("%s criterion %2d %s: %s (%.0f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(7, "break-time arithmetic", arithmetic);
  report(1, "conservation", conservation);
  report(2, "harmonic oracle", harmonic_oracle);

  const RunConfig free_config = free_diffusion_config();
  FreeRuns free;
  if (want({4, 5})) {
    free.grid = run_classical(free_config, ClassicalBackend::grid);
    free.ensemble = run_ensemble(free_config);
  }
  report(4, "diffusion law", [&] { return diffusion_law(free, free_config.diffusion, 10.0); });

  RunConfig fig1 = preset_config("paper-fig1");
  report(6, "Lyapunov exponent", [&] { return lyapunov(fig1); });
  report(11, "determinism", [&] { return determinism(scratch); });

  // One 12T paper-fig1 run feeds criteria 3, 5, 8 and the D = 0 side of 9.
  std::optional<CompareResult> d0;
  if (want({3, 5, 8, 9})) {
    RunConfig c = fig1;
    c.snapshot_periods.push_back(2.0);
    c.compare_schrodinger = want({3});
    d0 = run_compare(c, "", 1);
    for (const BackendResult& b : d0->runs) {
      for (const std::string& w : b.warnings) std::printf("  note: %s %s\n", b.name.c_str(), w.c_str());
    }
  }
  report(3, "cross-solver consistency", [&] { return cross_solver(*d0, fig1.period()); });
  report(5, "moment hierarchy",
         [&] { return moment_hierarchy(*d0, free, fig1, free_config.diffusion); });
  report(8, "correspondence breakdown", [&] {
    const SweepResult s = run_sweep(fig1, SweepAxis::initial_condition, "", 1);
    return breakdown(*d0, fig1, s);
  });
  report(9, "decoherence restores correspondence", [&] {
    const CompareResult d1 = run_compare(preset_config("paper-fig2"), "", 1);
    return decoherence(*d0, d1, fig1.period());
  });
  d0.reset();
  report(10, "convergence harness", [&] { return convergence(fig1); });

  std::printf("%d of %zu criteria failed\n", failures, chosen.size());
  return failures == 0 ? 0 : 1;
}
