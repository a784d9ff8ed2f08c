#include "qcc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "qcc/io.hpp"

namespace qcc {

std::unique_ptr<PotentialModel> RunConfig::potential() const {
  switch (potential_kind) {
    case PotentialKind::double_well:
      return std::make_unique<DrivenDoubleWell>(mass, b, a, drive_amplitude, drive_frequency);
    case PotentialKind::harmonic:
      return std::make_unique<HarmonicOracle>(mass, spring);
    case PotentialKind::free:
      return std::make_unique<FreeParticle>(mass, reference_period);
  }
  throw ConfigError("unknown potential kind");
}

double RunConfig::period() const { return potential()->period(); }

namespace {

std::size_t steps_for(double periods, std::size_t steps_per_period, const char* what) {
  const double exact = periods * static_cast<double>(steps_per_period);
  const double rounded = std::round(exact);
  if (!(periods >= 0.0) || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    throw ConfigError(std::string(what) + " does not land on a whole step");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

std::size_t RunConfig::total_steps() const {
  return steps_for(periods, steps_per_period, "time.periods");
}

EvolverSettings RunConfig::evolver_settings() const {
  return EvolverSettings::from_period(period(), steps_per_period, hbar, diffusion, output_every);
}

std::vector<std::size_t> RunConfig::snapshot_steps() const {
  std::vector<double> times = snapshot_periods;
  if (preset.rfind("paper-", 0) == 0) {
    for (double t : {0.0, 4.0, 8.0}) {
      if (t <= periods) times.push_back(t);
    }
  }
  std::vector<std::size_t> steps;
  for (double t : times) steps.push_back(steps_for(t, steps_per_period, "output.snapshots"));
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

void RunConfig::validate() const {
  if (!(mass > 0.0)) throw ConfigError("potential.mass must be positive");
  switch (potential_kind) {
    case PotentialKind::double_well:
      if (!(b > 0.0)) throw ConfigError("potential.B must be positive");
      if (!(drive_frequency > 0.0)) throw ConfigError("potential.drive_frequency must be positive");
      if (!std::isfinite(a) || !std::isfinite(drive_amplitude)) {
        throw ConfigError("potential parameters must be finite");
      }
      break;
    case PotentialKind::harmonic:
      if (!(spring > 0.0)) throw ConfigError("potential.spring must be positive");
      break;
    case PotentialKind::free:
      if (!(reference_period > 0.0)) throw ConfigError("potential.period must be positive");
      break;
  }
  if (!(hbar > 0.0)) throw ConfigError("quantum.hbar must be positive");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) throw ConfigError("noise.D must be >= 0");
  initial.validate();
  x_grid.build();
  p_grid.build();
  if (steps_per_period < 1) throw ConfigError("time.steps_per_period must be >= 1");
  if (output_every < 1) throw ConfigError("output.every must be >= 1");
  total_steps();
  for (double t : snapshot_periods) {
    if (!(t >= 0.0 && t <= periods)) throw ConfigError("output.snapshots must lie within the run");
  }
  snapshot_steps();
  if (ensemble_count < 2) throw ConfigError("ensemble.count must be >= 2");
  if (!(divergence.threshold > 0.0 && divergence.threshold < 1.0)) {
    throw ConfigError("analysis.threshold must lie in (0, 1)");
  }
  if (divergence.debounce < 1) throw ConfigError("analysis.debounce must be >= 1");
  if (!(lyapunov.renorm_interval > 0.0)) throw ConfigError("lyapunov.renorm_interval must be positive");
  if (lyapunov_trajectories < 10) throw ConfigError("lyapunov.trajectories must be >= 10");
  if (!(lyapunov_horizon_periods >= 20.0)) throw ConfigError("lyapunov.horizon_periods must be >= 20");
  if (!(converge_periods > 0.0)) throw ConfigError("converge.periods must be positive");
  steps_for(converge_periods, steps_per_period, "converge.periods");
  if (!(converge_tolerance > 0.0)) throw ConfigError("converge.tolerance must be positive");
  if (!(sweep.x_min < sweep.x_max && sweep.p_min < sweep.p_max)) {
    throw ConfigError("sweep rectangle is empty");
  }
  if (!(sweep.energy_min < sweep.energy_max)) throw ConfigError("sweep energy window is empty");
  if (!(sweep.screen_periods > 0.0)) throw ConfigError("sweep.screen_periods must be positive");
  if (sweep.count < 1) throw ConfigError("sweep.count must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

std::string kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::double_well:
      return "double-well";
    case PotentialKind::harmonic:
      return "harmonic";
    case PotentialKind::free:
      return "free";
  }
  return "?";
}

PotentialKind parse_kind(const std::string& v) {
  if (v == "double-well") return PotentialKind::double_well;
  if (v == "harmonic") return PotentialKind::harmonic;
  if (v == "free") return PotentialKind::free;
  throw ConfigError("potential.kind: unknown kind '" + v + "'");
}

QuantumBackend parse_quantum(const std::string& key, const std::string& v) {
  if (v == "master") return QuantumBackend::master;
  if (v == "schrodinger") return QuantumBackend::schrodinger;
  throw ConfigError(key + ": expected master or schrodinger, got '" + v + "'");
}

ClassicalBackend parse_classical(const std::string& key, const std::string& v) {
  if (v == "grid") return ClassicalBackend::grid;
  if (v == "ensemble") return ClassicalBackend::ensemble;
  throw ConfigError(key + ": expected grid or ensemble, got '" + v + "'");
}

struct Field {
  using Setter = std::function<void(RunConfig&, const std::string&)>;
  using Getter = std::function<std::string(const RunConfig&)>;
  Field(std::string k, Setter s, Getter g) : key(std::move(k)), set(std::move(s)), get(std::move(g)) {}

  std::string key;
  Setter set;
  Getter get;
  // Physics parameter: must be given explicitly or by a preset.
  bool required = false;
  // Potential kinds the key applies to (empty: all).
  std::vector<PotentialKind> kinds;
};

#define QCC_DOUBLE(name, member)                                                   \
  Field {                                                                          \
    name, [](RunConfig& c, const std::string& v) { c.member = parse_double(name, v); }, \
        [](const RunConfig& c) { return format_double(c.member); }                 \
  }
#define QCC_COUNT(name, member)                                                       \
  Field {                                                                             \
    name,                                                                             \
        [](RunConfig& c, const std::string& v) {                                      \
          c.member = static_cast<decltype(c.member)>(parse_unsigned(name, v));        \
        },                                                                            \
        [](const RunConfig& c) { return std::to_string(c.member); }                   \
  }
#define QCC_BOOL(name, member)                                                      \
  Field {                                                                           \
    name, [](RunConfig& c, const std::string& v) { c.member = parse_bool(name, v); }, \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); } \
  }

Field required(Field f, std::vector<PotentialKind> kinds = {}) {
  f.required = true;
  f.kinds = std::move(kinds);
  return f;
}

const std::vector<Field>& fields() {
  using K = PotentialKind;
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(required(Field{"potential.kind",
                               [](RunConfig& c, const std::string& v) { c.potential_kind = parse_kind(v); },
                               [](const RunConfig& c) { return kind_name(c.potential_kind); }}));
    t.push_back(required(QCC_DOUBLE("potential.mass", mass)));
    t.push_back(required(QCC_DOUBLE("potential.B", b), {K::double_well}));
    t.push_back(required(QCC_DOUBLE("potential.A", a), {K::double_well}));
    t.push_back(required(QCC_DOUBLE("potential.drive_amplitude", drive_amplitude), {K::double_well}));
    t.push_back(required(QCC_DOUBLE("potential.drive_frequency", drive_frequency), {K::double_well}));
    t.push_back(required(QCC_DOUBLE("potential.spring", spring), {K::harmonic}));
    t.push_back(required(QCC_DOUBLE("potential.period", reference_period), {K::free}));
    t.push_back(required(QCC_DOUBLE("quantum.hbar", hbar)));
    t.push_back(required(QCC_DOUBLE("noise.D", diffusion)));
    t.push_back(required(QCC_DOUBLE("initial.x0", initial.x0)));
    t.push_back(required(QCC_DOUBLE("initial.p0", initial.p0)));
    t.push_back(required(QCC_DOUBLE("initial.var_x", initial.var_x)));
    t.push_back(required(QCC_DOUBLE("initial.var_p", initial.var_p)));
    t.push_back(QCC_DOUBLE("initial.cov_xp", initial.cov_xp));
    t.push_back(required(QCC_DOUBLE("time.periods", periods)));
    t.push_back(QCC_COUNT("time.steps_per_period", steps_per_period));
    t.push_back(QCC_DOUBLE("grid.x.min", x_grid.minimum));
    t.push_back(QCC_DOUBLE("grid.x.max", x_grid.maximum));
    t.push_back(QCC_COUNT("grid.x.count", x_grid.count));
    t.push_back(QCC_DOUBLE("grid.p.min", p_grid.minimum));
    t.push_back(QCC_DOUBLE("grid.p.max", p_grid.maximum));
    t.push_back(QCC_COUNT("grid.p.count", p_grid.count));
    t.push_back(Field{"kernel.mode",
                      [](RunConfig& c, const std::string& v) {
                        if (v == "precomputed") {
                          c.kernel_mode = KernelMode::precomputed;
                        } else if (v == "on-the-fly") {
                          c.kernel_mode = KernelMode::on_the_fly;
                        } else {
                          throw ConfigError("kernel.mode: expected precomputed or on-the-fly");
                        }
                      },
                      [](const RunConfig& c) {
                        return std::string(c.kernel_mode == KernelMode::precomputed ? "precomputed"
                                                                                    : "on-the-fly");
                      }});
    t.push_back(QCC_COUNT("output.every", output_every));
    t.push_back(Field{"output.snapshots",
                      [](RunConfig& c, const std::string& v) {
                        c.snapshot_periods = parse_list("output.snapshots", v);
                      },
                      [](const RunConfig& c) { return format_list(c.snapshot_periods); }});
    t.push_back(QCC_COUNT("ensemble.count", ensemble_count));
    t.push_back(QCC_COUNT("run.seed", seed));
    t.push_back(QCC_DOUBLE("analysis.threshold", divergence.threshold));
    t.push_back(QCC_COUNT("analysis.debounce", divergence.debounce));
    t.push_back(QCC_DOUBLE("analysis.chi_cutoff", chi_cutoff));
    t.push_back(QCC_DOUBLE("lyapunov.renorm_interval", lyapunov.renorm_interval));
    t.push_back(QCC_BOOL("lyapunov.noisy_tangents", lyapunov.noisy_tangents));
    t.push_back(QCC_DOUBLE("lyapunov.x_limit", lyapunov.x_limit));
    t.push_back(QCC_DOUBLE("lyapunov.p_limit", lyapunov.p_limit));
    t.push_back(QCC_COUNT("lyapunov.trajectories", lyapunov_trajectories));
    t.push_back(QCC_DOUBLE("lyapunov.horizon_periods", lyapunov_horizon_periods));
    t.push_back(Field{"compare.quantum",
                      [](RunConfig& c, const std::string& v) {
                        c.compare_quantum = parse_quantum("compare.quantum", v);
                      },
                      [](const RunConfig& c) { return to_string(c.compare_quantum); }});
    t.push_back(Field{"compare.classical",
                      [](RunConfig& c, const std::string& v) {
                        c.compare_classical = parse_classical("compare.classical", v);
                      },
                      [](const RunConfig& c) { return to_string(c.compare_classical); }});
    t.push_back(QCC_BOOL("compare.schrodinger", compare_schrodinger));
    t.push_back(QCC_BOOL("compare.ensemble", compare_ensemble));
    t.push_back(QCC_DOUBLE("converge.periods", converge_periods));
    t.push_back(QCC_DOUBLE("converge.tolerance", converge_tolerance));
    t.push_back(Field{"sweep.values",
                      [](RunConfig& c, const std::string& v) {
                        c.sweep.values = parse_list("sweep.values", v);
                      },
                      [](const RunConfig& c) { return format_list(c.sweep.values); }});
    t.push_back(QCC_COUNT("sweep.count", sweep.count));
    t.push_back(QCC_DOUBLE("sweep.x_min", sweep.x_min));
    t.push_back(QCC_DOUBLE("sweep.x_max", sweep.x_max));
    t.push_back(QCC_DOUBLE("sweep.p_min", sweep.p_min));
    t.push_back(QCC_DOUBLE("sweep.p_max", sweep.p_max));
    t.push_back(QCC_DOUBLE("sweep.energy_min", sweep.energy_min));
    t.push_back(QCC_DOUBLE("sweep.energy_max", sweep.energy_max));
    t.push_back(QCC_DOUBLE("sweep.screen_periods", sweep.screen_periods));
    t.push_back(QCC_DOUBLE("sweep.lambda_min", sweep.lambda_min));
    t.push_back(QCC_COUNT("sweep.max_attempts", sweep.max_attempts));
    t.push_back(Field{"sweep.quantum",
                      [](RunConfig& c, const std::string& v) {
                        c.sweep.quantum = parse_quantum("sweep.quantum", v);
                      },
                      [](const RunConfig& c) { return to_string(c.sweep.quantum); }});
    t.push_back(Field{"sweep.classical",
                      [](RunConfig& c, const std::string& v) {
                        c.sweep.classical = parse_classical("sweep.classical", v);
                      },
                      [](const RunConfig& c) { return to_string(c.sweep.classical); }});
    return t;
  }();
  return table;
}

#undef QCC_DOUBLE
#undef QCC_COUNT
#undef QCC_BOOL

bool applies(const Field& f, PotentialKind kind) {
  return f.kinds.empty() || std::find(f.kinds.begin(), f.kinds.end(), kind) != f.kinds.end();
}

RunConfig paper_base() {
  RunConfig c;
  const DrivenDoubleWell v = DrivenDoubleWell::paper_regime();
  c.potential_kind = PotentialKind::double_well;
  c.mass = v.mass();
  c.b = v.b();
  c.a = v.a();
  c.drive_amplitude = v.drive_amplitude();
  c.drive_frequency = v.drive_frequency();
  c.hbar = 0.1;
  c.initial = GaussianInitialState::paper_instance();
  c.snapshot_periods = {0.0, 4.0, 8.0};
  return c;
}

}  // namespace

std::string to_string(QuantumBackend b) {
  return b == QuantumBackend::master ? "master" : "schrodinger";
}

std::string to_string(ClassicalBackend b) {
  return b == ClassicalBackend::grid ? "grid" : "ensemble";
}

std::vector<std::string> preset_names() { return {"paper-fig1", "paper-fig2", "harmonic"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "paper-fig1") {
    c = paper_base();
    c.diffusion = 0.0;
    c.periods = 12.0;
  } else if (name == "paper-fig2") {
    c = paper_base();
    c.diffusion = 0.025;
    c.periods = 8.0;
  } else if (name == "harmonic") {
    c.potential_kind = PotentialKind::harmonic;
    c.mass = 1.0;
    c.spring = 4.0;
    c.hbar = 0.1;
    c.diffusion = 0.0;
    // Coherent state of omega0 = 2: var_x = hbar / (2 m omega0). The packet
    // starts off the turning point so <x>(T) is not stationary in the
    // phase error, which would hide the second-order time error.
    c.initial = GaussianInitialState{1.0, 1.0, 0.025, 0.1, 0.0};
    c.x_grid = {-4.0, 4.0, 256};
    c.p_grid = {-8.0, 8.0, 256};
    c.periods = 1.0;
    c.snapshot_periods = {0.0, 1.0};
    c.lyapunov.x_limit = 4.0;
    c.lyapunov.p_limit = 8.0;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.preset = name;
  c.validate();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, const Field*> by_key;
  for (const Field& f : fields()) by_key[f.key] = &f;

  RunConfig c;
  std::set<std::string> given;
  bool from_preset = false;
  bool any_key = false;
  double dt = 0.0;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "preset") {
      if (any_key) throw ConfigError("line " + std::to_string(number) + ": preset must come first");
      c = preset_config(value);
      from_preset = true;
      any_key = true;
      continue;
    }
    if (key == "time.dt") {
      if (!given.insert(key).second) {
        throw ConfigError("line " + std::to_string(number) + ": duplicate key 'time.dt'");
      }
      dt = parse_double(key, value);
      any_key = true;
      continue;
    }
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    if (!given.insert(key).second) {
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    it->second->set(c, value);
    any_key = true;
  }

  for (const Field& f : fields()) {
    const bool set = given.count(f.key) > 0;
    if (set && !applies(f, c.potential_kind)) {
      throw ConfigError(f.key + " does not apply to potential.kind = " + kind_name(c.potential_kind));
    }
    if (f.required && !from_preset && !set && applies(f, c.potential_kind)) {
      throw ConfigError("missing key '" + f.key + "' (physics parameters have no default)");
    }
  }
  if (from_preset && given.count("potential.kind")) {
    // A preset's kind-specific parameters would otherwise leak into the new kind.
    throw ConfigError("potential.kind cannot be overridden on top of a preset");
  }
  if (given.count("time.dt")) {
    if (given.count("time.steps_per_period")) {
      throw ConfigError("give either time.dt or time.steps_per_period, not both");
    }
    if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
    const double n = c.period() / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * n || std::round(n) < 1.0) {
      throw ConfigError("time.dt does not divide the drive period into whole steps");
    }
    c.steps_per_period = static_cast<std::size_t>(std::round(n));
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string write_config(const RunConfig& c) {
  std::string out;
  if (!c.preset.empty()) out += "preset = " + c.preset + "\n";
  for (const Field& f : fields()) {
    if (!c.preset.empty() && f.key == "potential.kind") continue;
    if (!applies(f, c.potential_kind)) continue;
    out += f.key + " = " + f.get(c) + "\n";
  }
  return out;
}

std::string config_digest(const RunConfig& config) {
  const std::string text = write_config(config);
  return hex64(fnv1a64(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size())));
}

}  // namespace qcc
