#include "qcc/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "qcc/classical.hpp"
#include "qcc/fft.hpp"

namespace qcc {

double MomentRecord::raw_x(int n) const {
  const double m = mean_x;
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return m;
    case 2:
      return central_x2 + m * m;
    case 3:
      return central_x3 + 3.0 * m * central_x2 + m * m * m;
    case 4:
      return central_x4 + 4.0 * m * central_x3 + 6.0 * m * m * central_x2 + m * m * m * m;
    default:
      throw ConfigError("raw_x: moment order above 4 is not recorded");
  }
}

namespace {

struct Central {
  double mean = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

// Moments of sample points `q` with weights `w` (w sums to `total`).
Central weighted_moments(std::span<const double> q, std::span<const double> w, double total) {
  Central out;
  std::vector<double> terms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) terms[i] = w[i] * q[i];
  out.mean = compensated_sum(terms) / total;
  std::vector<double> t2(q.size()), t3(q.size()), t4(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = q[i] - out.mean;
    t2[i] = w[i] * d * d;
    t3[i] = t2[i] * d;
    t4[i] = t3[i] * d;
  }
  out.c2 = compensated_sum(t2) / total;
  out.c3 = compensated_sum(t3) / total;
  out.c4 = compensated_sum(t4) / total;
  return out;
}

void fill(MomentRecord& r, const Central& x, const Central& p) {
  r.mean_x = x.mean;
  r.central_x2 = x.c2;
  r.central_x3 = x.c3;
  r.central_x4 = x.c4;
  r.mean_p = p.mean;
  r.central_p2 = p.c2;
  r.central_p3 = p.c3;
  r.central_p4 = p.c4;
}

}  // namespace

MomentRecord compute_moments(const PhaseField& field, const PotentialModel& potential, double t) {
  field.check_shape();
  const double mass = integrate_field(field);
  if (!(std::abs(mass - 1.0) <= 1e-6)) {
    throw NumericalError("compute_moments: field mass " + std::to_string(mass) + " is not 1");
  }
  const std::vector<double> wx = marginal(field, Axis::x);
  const std::vector<double> wp = marginal(field, Axis::p);
  const double dx = field.x_axis.spacing();
  const double dp = field.p_axis.spacing();
  std::vector<double> cx(wx.size()), cp(wp.size());
  for (std::size_t i = 0; i < wx.size(); ++i) cx[i] = wx[i] * dx;
  for (std::size_t i = 0; i < wp.size(); ++i) cp[i] = wp[i] * dp;

  MomentRecord r;
  r.t = t;
  fill(r, weighted_moments(field.x_axis.nodes(), cx, 1.0), weighted_moments(field.p_axis.nodes(), cp, 1.0));

  const std::size_t np = field.np();
  std::vector<double> row(np), rows(field.nx()), vterms(field.nx());
  for (std::size_t ix = 0; ix < field.nx(); ++ix) {
    for (std::size_t ip = 0; ip < np; ++ip) {
      row[ip] = field.at(ix, ip) * (field.p_axis.node(ip) - r.mean_p);
    }
    const double x = field.x_axis.node(ix);
    rows[ix] = compensated_sum(row) * (x - r.mean_x);
    vterms[ix] = cx[ix] * potential.value(x, t);
  }
  r.cross_xp = compensated_sum(rows) * field.cell_area();
  r.energy = r.raw_p2() / (2.0 * potential.mass()) + compensated_sum(vterms);
  return r;
}

MomentRecord compute_moments(const ParticleEnsemble& e, const PotentialModel& potential,
                             double t) {
  if (e.size() == 0) throw ConfigError("compute_moments: empty ensemble");
  const double n = static_cast<double>(e.size());
  const std::vector<double> w(e.size(), 1.0);
  MomentRecord r;
  r.t = t;
  fill(r, weighted_moments(e.x, w, n), weighted_moments(e.p, w, n));
  std::vector<double> cross(e.size()), v(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    cross[i] = (e.x[i] - r.mean_x) * (e.p[i] - r.mean_p);
    v[i] = potential.value(e.x[i], t);
  }
  r.cross_xp = compensated_sum(cross) / n;
  r.energy = r.raw_p2() / (2.0 * potential.mass()) + compensated_sum(v) / n;
  return r;
}

MomentRecord compute_moments(const ComplexField& psi, const PotentialModel& potential, double hbar,
                             double t) {
  const AxisGrid& a = psi.axis;
  const std::size_t n = a.count();
  if (psi.values.size() != n) throw NumericalError("compute_moments: wave function size mismatch");
  const double norm = psi.norm();
  if (!(std::abs(norm - 1.0) <= 1e-6)) {
    throw NumericalError("compute_moments: wave function norm " + std::to_string(norm) + " is not 1");
  }
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j) rho[j] = std::norm(psi.values[j]) * a.spacing();

  ComplexLineTransform fft(n);
  Complex* buf = fft.data();
  std::copy(psi.values.begin(), psi.values.end(), buf);
  fft.forward();
  std::vector<double> pk(n), wk(n);
  for (std::size_t j = 0; j < n; ++j) {
    pk[j] = hbar * a.frequency(j);
    wk[j] = std::norm(buf[j]);
  }
  const double wsum = compensated_sum(wk);

  MomentRecord r;
  r.t = t;
  fill(r, weighted_moments(a.nodes(), rho, compensated_sum(rho)), weighted_moments(pk, wk, wsum));

  // -i hbar dpsi/dx by spectral differentiation; the Nyquist mode has no
  // well-defined derivative and is dropped.
  for (std::size_t j = 0; j < n; ++j) {
    buf[j] *= j == n / 2 ? Complex(0.0) : Complex(hbar * a.frequency(j) / static_cast<double>(n), 0.0);
  }
  fft.inverse();
  std::vector<double> sym(n), v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = a.node(j);
    sym[j] = (std::conj(psi.values[j]) * (x - r.mean_x) * buf[j]).real() * a.spacing();
    v[j] = rho[j] * potential.value(x, t);
  }
  r.cross_xp = compensated_sum(sym) / norm;
  r.energy = r.raw_p2() / (2.0 * potential.mass()) + compensated_sum(v) / norm;
  return r;
}

namespace {

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
  return std::sqrt(compensated_sum(sq) / static_cast<double>(v.size()));
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Fourth-order centred first derivative at interior index i.
double derivative(std::span<const double> f, std::size_t i, double h) {
  return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
}

}  // namespace

ResidualSummary moment_residuals(std::span<const MomentRecord> series,
                                 const PotentialModel& potential, double diffusion) {
  if (series.size() < 5) throw ConfigError("moment_residuals: need at least 5 records");
  const double h = series[1].t - series[0].t;
  if (!(h > 0.0)) throw ConfigError("moment_residuals: time stamps must increase");
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double step = series[i].t - series[i - 1].t;
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(series[i].t))) {
      throw ConfigError("moment_residuals: irregular time spacing");
    }
  }
  const std::size_t n = series.size();
  const double m = potential.mass();
  std::vector<double> mx(n), mp(n), p2(n);
  for (std::size_t i = 0; i < n; ++i) {
    mx[i] = series[i].mean_x;
    mp[i] = series[i].mean_p;
    p2[i] = series[i].raw_p2();
  }

  ResidualSummary out;
  out.r3_closed = true;
  std::vector<double> r1, r2, r3, velocity, force, dp2;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const MomentRecord& rec = series[i];
    const Polynomial g = potential.force_polynomial(rec.t);
    double mean_force = 0.0;
    for (int k = 0; k <= 3; ++k) mean_force += g.c[static_cast<std::size_t>(k)] * rec.raw_x(k);

    MomentResidual res;
    res.t = rec.t;
    res.r1 = derivative(mx, i, h) - rec.mean_p / m;
    res.r2 = derivative(mp, i, h) + mean_force;
    res.dp2_dt = derivative(p2, i, h);
    // <p V'> needs <p x^k> for every power in V'; only k <= 1 is recorded.
    res.r3_closed = g.degree() <= 1;
    if (res.r3_closed) {
      res.p_force = g.c[0] * rec.mean_p + g.c[1] * (rec.cross_xp + rec.mean_x * rec.mean_p);
      res.r3 = res.dp2_dt + 2.0 * res.p_force - 2.0 * diffusion;
      r3.push_back(res.r3);
      dp2.push_back(res.dp2_dt);
    } else {
      out.r3_closed = false;
    }
    r1.push_back(res.r1);
    r2.push_back(res.r2);
    velocity.push_back(rec.mean_p / m);
    force.push_back(mean_force);
    out.residuals.push_back(res);
  }
  const auto relative = [](std::span<const double> r, std::span<const double> scale) {
    const double s = rms(scale);
    const double top = max_abs(r);
    return s > 0.0 ? top / s : top;
  };
  out.r1_relative = relative(r1, velocity);
  out.r2_relative = relative(r2, force);
  if (out.r3_closed) out.r3_relative = relative(r3, dp2);
  return out;
}

namespace {

void check_aligned(std::span<const MomentRecord> q, std::span<const MomentRecord> c) {
  if (q.size() != c.size()) throw ConfigError("series have different lengths");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::abs(q[i].t - c[i].t) > 1e-9 * std::max(1.0, std::abs(q[i].t))) {
      throw ConfigError("series time stamps differ at record " + std::to_string(i));
    }
  }
}

double reference_rms(std::span<const MomentRecord> c) {
  std::vector<double> v;
  for (const MomentRecord& r : c) v.push_back(r.mean_x);
  return rms(v);
}

}  // namespace

std::optional<double> divergence_time(std::span<const MomentRecord> quantum,
                                      std::span<const MomentRecord> classical,
                                      const DivergenceOptions& options) {
  check_aligned(quantum, classical);
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw ConfigError("divergence threshold must lie in (0, 1)");
  }
  const double limit = options.threshold * reference_rms(classical);
  const std::size_t need = std::max<std::size_t>(options.debounce, 1);
  std::size_t run = 0;
  for (std::size_t i = 0; i < quantum.size(); ++i) {
    if (std::abs(quantum[i].mean_x - classical[i].mean_x) > limit) {
      if (++run >= need) return quantum[i + 1 - run].t;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

BreakTimeEstimate break_time(double lambda, double chi, double delta_p, double hbar) {
  if (!(lambda > 0.0 && chi > 0.0 && delta_p > 0.0 && hbar > 0.0)) {
    throw ConfigError("break_time: all inputs must be positive");
  }
  BreakTimeEstimate b{lambda, chi, delta_p, hbar, 0.0, false};
  const double arg = chi * delta_p / hbar;
  b.t_hbar = std::log(arg) / lambda;
  b.valid = arg > 1.0;
  return b;
}

ChiEstimate chi_estimate(const PhaseField& field, const PotentialModel& potential, double t,
                         double cutoff) {
  const std::vector<double> w = marginal(field, Axis::x);
  return chi_estimate(w, field.x_axis, potential, t, cutoff);
}

ChiEstimate chi_estimate(std::span<const double> w, const AxisGrid& a,
                         const PotentialModel& potential, double t, double cutoff) {
  if (w.size() != a.count()) throw NumericalError("chi_estimate: density does not match the axis");
  if (cutoff < 0.0) {
    double top = 0.0;
    for (double x : a.nodes()) top = std::max(top, std::abs(potential.third_derivative(x)));
    cutoff = 1e-3 * top;
  }
  std::vector<double> num, mass, excluded;
  for (std::size_t j = 0; j < a.count(); ++j) {
    const double x = a.node(j);
    const double v3 = potential.third_derivative(x);
    const double cell = w[j] * a.spacing();
    if (std::abs(v3) < cutoff || v3 == 0.0) {
      excluded.push_back(cell);
      continue;
    }
    num.push_back(cell * potential.gradient(x, t) / v3);
    mass.push_back(cell);
  }
  const double kept = compensated_sum(mass);
  if (mass.empty() || kept == 0.0) {
    throw NumericalError("chi_estimate: every cell was excluded by the V''' cutoff");
  }
  ChiEstimate out;
  out.chi = std::sqrt(std::abs(compensated_sum(num) / kept));
  out.excluded_mass = compensated_sum(excluded);
  return out;
}

double coherence_scale(double diffusion, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("coherence_scale: lambda must be positive");
  if (!(diffusion >= 0.0)) throw ConfigError("coherence_scale: D must be nonnegative");
  return std::sqrt(2.0 * diffusion / lambda);
}

double wigner_negativity(const PhaseField& field) {
  std::vector<double> neg(field.values.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = std::max(0.0, -field.values[i]);
  return compensated_sum(neg) * field.cell_area();
}

double ringing_ratio(const PhaseField& field) {
  if (field.values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  if (*lo >= 0.0 || *hi <= 0.0) return *lo >= 0.0 ? 0.0 : INFINITY;
  return -*lo / *hi;
}

Distance distribution_distance(const PhaseField& a, const PhaseField& b) {
  a.check_shape();
  b.check_shape();
  if (!(a.x_axis == b.x_axis) || !(a.p_axis == b.p_axis)) {
    throw ConfigError("distribution_distance: grids differ");
  }
  std::vector<double> d1(a.values.size()), d2(a.values.size());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    d1[i] = std::abs(d);
    d2[i] = d * d;
  }
  const double area = a.cell_area();
  return {compensated_sum(d1) * area, std::sqrt(compensated_sum(d2)) * area};
}

ComparisonReport compare_series(std::span<const MomentRecord> quantum,
                                std::span<const MomentRecord> classical,
                                const DivergenceOptions& options) {
  check_aligned(quantum, classical);
  ComparisonReport r;
  r.options = options;
  r.reference_rms = reference_rms(classical);
  for (std::size_t i = 0; i < quantum.size(); ++i) {
    r.t.push_back(quantum[i].t);
    r.abs_delta_x.push_back(std::abs(quantum[i].mean_x - classical[i].mean_x));
    r.abs_delta_p.push_back(std::abs(quantum[i].mean_p - classical[i].mean_p));
  }
  r.divergence_time = divergence_time(quantum, classical, options);
  if (r.divergence_time && r.reference_rms > 0.0) {
    const std::size_t start = (3 * quantum.size()) / 4;
    std::vector<double> tail;
    for (std::size_t i = start; i < quantum.size(); ++i) {
      tail.push_back(r.abs_delta_x[i] / r.reference_rms);
    }
    if (!tail.empty()) {
      std::sort(tail.begin(), tail.end());
      const std::size_t k = tail.size() / 2;
      r.saturated_discrepancy =
          tail.size() % 2 == 1 ? tail[k] : 0.5 * (tail[k - 1] + tail[k]);
    }
  }
  return r;
}

double mean_abs_delta_x(const ComparisonReport& report, double t0, double t1) {
  const double eps = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t1)});
  std::vector<double> picked;
  for (std::size_t i = 0; i < report.t.size(); ++i) {
    if (report.t[i] >= t0 - eps && report.t[i] <= t1 + eps) picked.push_back(report.abs_delta_x[i]);
  }
  if (picked.empty()) throw ConfigError("mean_abs_delta_x: no records in the window");
  return compensated_sum(picked) / static_cast<double>(picked.size());
}

}  // namespace qcc
