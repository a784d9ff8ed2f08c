#include "qcc/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcc {

namespace {

// Lines per transform batch; every grid count is a power of two >= 8.
constexpr std::size_t kBatch = 8;

// Positive frequency of half-spectrum bin j of an axis (bin count/2 is the
// Nyquist mode; its sign is irrelevant since only the real part of the
// multiplier is applied there).
double half_spectrum_frequency(const AxisGrid& axis, std::size_t j) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / axis.length();
}

}  // namespace

PhaseSpaceEvolver::PhaseSpaceEvolver(const AxisGrid& x_axis, const AxisGrid& p_axis,
                                     const PotentialModel& potential,
                                     const EvolverSettings& settings, Dynamics dynamics,
                                     KernelMode mode)
    : x_axis_(x_axis),
      p_axis_(p_axis),
      potential_(potential.clone()),
      settings_(settings),
      dynamics_(dynamics),
      mode_(mode),
      work_(x_axis.count() * p_axis.count()),
      columns_(x_axis.count() * kBatch),
      along_x_(x_axis.count(), kBatch),
      along_p_(p_axis.count(), kBatch) {
  settings_.validate();
  const std::size_t nx = x_axis_.count();
  const std::size_t np = p_axis_.count();
  const double m = potential_->mass();
  const double dt = settings_.dt;

  // Streaming multipliers exp(-i k p dt' / m) / nx on the (p, k) half spectrum.
  const std::size_t hx = nx / 2 + 1;
  stream_half_.resize(hx * np);
  stream_full_.resize(hx * np);
  for (std::size_t ip = 0; ip < np; ++ip) {
    const double p = p_axis_.node(ip);
    for (std::size_t ik = 0; ik < hx; ++ik) {
      const double k = half_spectrum_frequency(x_axis_, ik);
      Complex half = std::polar(1.0, -k * p * 0.5 * dt / m);
      Complex full = std::polar(1.0, -k * p * dt / m);
      if (ik == nx / 2) {
        half = half.real();
        full = full.real();
      }
      stream_half_[ip * hx + ik] = half / static_cast<double>(nx);
      stream_full_[ip * hx + ik] = full / static_cast<double>(nx);
    }
  }

  const std::size_t hp = np / 2 + 1;
  diffusion_decay_.resize(hp);
  drive_phase_.resize(hp);
  for (std::size_t is = 0; is < hp; ++is) {
    const double s = half_spectrum_frequency(p_axis_, is);
    diffusion_decay_[is] = std::exp(-settings_.diffusion * s * s * dt) / static_cast<double>(np);
  }

  if (mode_ == KernelMode::precomputed) {
    const Polynomial u = potential_->static_polynomial();
    const Polynomial du = u.derivative();
    kick_static_.resize(nx * hp);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = x_axis_.node(ix);
      for (std::size_t is = 0; is < hp; ++is) {
        const double s = half_spectrum_frequency(p_axis_, is);
        const double phase = dynamics_ == Dynamics::quantum
                                 ? quantum_static_phase(u, x, s, dt, settings_.hbar)
                                 : dt * (s * du(x) + 0.0);
        kick_static_[ix * hp + is] = std::polar(1.0, phase);
      }
    }
  }
}

void PhaseSpaceEvolver::check_grid(const PhaseField& field) const {
  field.check_shape();
  if (!(field.x_axis == x_axis_) || !(field.p_axis == p_axis_)) {
    throw NumericalError("phase field grid does not match the evolver grid");
  }
}

namespace {

// Plain complex product; avoids the NaN-recovery path of operator*.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

void PhaseSpaceEvolver::stream(double fraction) {
  const std::vector<Complex>& table = fraction == 1.0 ? stream_full_ : stream_half_;
  const std::size_t nx = x_axis_.count();
  const std::size_t np = p_axis_.count();
  const std::size_t hx = nx / 2 + 1;
  double* f = work_.data();
  double* cols = columns_.data();
  Complex* spec = along_x_.spectrum();
  for (std::size_t ip0 = 0; ip0 < np; ip0 += kBatch) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double* src = f + ix * np + ip0;
      for (std::size_t b = 0; b < kBatch; ++b) cols[b * nx + ix] = src[b];
    }
    along_x_.forward(cols);
    for (std::size_t b = 0; b < kBatch; ++b) {
      Complex* line = spec + b * hx;
      const Complex* mult = table.data() + (ip0 + b) * hx;
      for (std::size_t ik = 0; ik < hx; ++ik) line[ik] = mul(line[ik], mult[ik]);
    }
    along_x_.inverse(cols);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double* dst = f + ix * np + ip0;
      for (std::size_t b = 0; b < kBatch; ++b) dst[b] = cols[b * nx + ix];
    }
  }
}

void PhaseSpaceEvolver::kick(double t_mid) {
  const std::size_t nx = x_axis_.count();
  const std::size_t np = p_axis_.count();
  const std::size_t hp = np / 2 + 1;
  const double dt = settings_.dt;
  const double force = potential_->drive(t_mid);
  for (std::size_t is = 0; is < hp; ++is) {
    const double s = half_spectrum_frequency(p_axis_, is);
    drive_phase_[is] = std::polar(diffusion_decay_[is], dt * s * force);
  }
  const Polynomial u = potential_->static_polynomial();
  const Polynomial du = u.derivative();
  Complex* spec = along_p_.spectrum();
  for (std::size_t ix0 = 0; ix0 < nx; ix0 += kBatch) {
    double* rows = work_.data() + ix0 * np;
    along_p_.forward(rows);
    for (std::size_t b = 0; b < kBatch; ++b) {
      const std::size_t ix = ix0 + b;
      Complex* row = spec + b * hp;
      if (mode_ == KernelMode::precomputed) {
        const Complex* k = kick_static_.data() + ix * hp;
        for (std::size_t is = 0; is + 1 < hp; ++is) row[is] = mul(row[is], mul(k[is], drive_phase_[is]));
        row[hp - 1] = row[hp - 1].real() * mul(k[hp - 1], drive_phase_[hp - 1]).real();
      } else {
        const double x = x_axis_.node(ix);
        for (std::size_t is = 0; is < hp; ++is) {
          const double s = half_spectrum_frequency(p_axis_, is);
          const double phase = dynamics_ == Dynamics::quantum
                                   ? quantum_static_phase(u, x, s, dt, settings_.hbar)
                                   : dt * (s * du(x) + 0.0);
          const Complex mult = mul(std::polar(1.0, phase), drive_phase_[is]);
          row[is] = is + 1 < hp ? mul(row[is], mult) : Complex(row[is].real() * mult.real(), 0.0);
        }
      }
    }
    along_p_.inverse(rows);
  }
}

void PhaseSpaceEvolver::advance(PhaseField& field, std::size_t steps) {
  check_grid(field);
  if (steps == 0) return;
  std::copy(field.values.begin(), field.values.end(), work_.data());
  const double t0 = field.time;
  const double dt = settings_.dt;
  stream(0.5);
  for (std::size_t i = 0; i < steps; ++i) {
    kick(t0 + (static_cast<double>(i) + 0.5) * dt);
    stream(i + 1 < steps ? 1.0 : 0.5);
  }
  const double* w = work_.data();
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (!std::isfinite(w[i])) {
      throw NumericalError("non-finite phase-space value within " + std::to_string(steps) +
                           " steps after t = " + std::to_string(t0));
    }
  }
  std::copy(w, w + field.values.size(), field.values.begin());
  field.time = t0 + static_cast<double>(steps) * dt;
}

PhaseField wigner_master_step(const PhaseField& f, const PotentialModel& potential,
                              const EvolverSettings& settings, double t) {
  PhaseSpaceEvolver evolver(f.x_axis, f.p_axis, potential, settings, Dynamics::quantum);
  PhaseField out = f;
  out.time = t;
  evolver.step(out);
  return out;
}

PhaseField fokker_planck_step(const PhaseField& f, const PotentialModel& potential,
                              const EvolverSettings& settings, double t) {
  PhaseSpaceEvolver evolver(f.x_axis, f.p_axis, potential, settings, Dynamics::classical);
  PhaseField out = f;
  out.time = t;
  evolver.step(out);
  return out;
}

}  // namespace qcc
