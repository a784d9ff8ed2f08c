#include "qcc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qcc {

ComplexField gaussian_packet(const GaussianInitialState& init, const AxisGrid& axis, double hbar) {
  init.validate();
  if (!(hbar > 0.0)) throw ConfigError("gaussian_packet: hbar must be positive");
  if (init.cov_xp != 0.0) {
    throw ConfigError("gaussian_packet: sheared packets (cov_xp != 0) are not supported");
  }
  if (!init.is_minimum_uncertainty(hbar)) {
    throw ConfigError("gaussian_packet: var_x * var_p must equal (hbar/2)^2 for a pure packet");
  }
  ComplexField psi(axis, 0.0);
  const double amp = std::pow(2.0 * std::numbers::pi * init.var_x, -0.25);
  for (std::size_t j = 0; j < axis.count(); ++j) {
    const double x = axis.node(j);
    const double d = x - init.x0;
    psi.values[j] = std::polar(amp * std::exp(-d * d / (4.0 * init.var_x)), init.p0 * x / hbar);
  }
  const double edge = std::max(std::norm(psi.values.front()), std::norm(psi.values.back()));
  if (edge > 1e-10) {
    throw ConfigError("gaussian_packet: packet tails exceed 1e-10 at the domain edge");
  }
  const double n = psi.norm();
  for (auto& v : psi.values) v /= std::sqrt(n);
  return psi;
}

SchrodingerEvolver::SchrodingerEvolver(const AxisGrid& axis, const PotentialModel& potential,
                                       const EvolverSettings& settings)
    : axis_(axis),
      potential_(potential.clone()),
      settings_(settings),
      fft_(axis.count()),
      kinetic_(axis.count()),
      half_potential_(axis.count()) {
  settings_.validate();
  const double n = static_cast<double>(axis.count());
  const double m = potential_->mass();
  for (std::size_t j = 0; j < axis.count(); ++j) {
    const double k = axis.frequency(j);
    kinetic_[j] = std::polar(1.0 / n, -settings_.hbar * k * k * settings_.dt / (2.0 * m));
  }
}

void SchrodingerEvolver::advance(ComplexField& psi, std::size_t steps) {
  if (!(psi.axis == axis_) || psi.values.size() != axis_.count()) {
    throw NumericalError("wave function grid does not match the evolver grid");
  }
  const std::size_t n = axis_.count();
  const double dt = settings_.dt;
  const double hbar = settings_.hbar;
  const Polynomial u = potential_->static_polynomial();
  Complex* buf = fft_.data();
  std::copy(psi.values.begin(), psi.values.end(), buf);
  const double t0 = psi.time;
  for (std::size_t s = 0; s < steps; ++s) {
    const double f = potential_->drive(t0 + (static_cast<double>(s) + 0.5) * dt);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = axis_.node(j);
      half_potential_[j] = std::polar(1.0, -(u(x) + x * f) * dt / (2.0 * hbar));
    }
    for (std::size_t j = 0; j < n; ++j) buf[j] *= half_potential_[j];
    fft_.forward();
    for (std::size_t j = 0; j < n; ++j) buf[j] *= kinetic_[j];
    fft_.inverse();
    for (std::size_t j = 0; j < n; ++j) buf[j] *= half_potential_[j];
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(buf[j].real()) || !std::isfinite(buf[j].imag())) {
      throw NumericalError("non-finite wave function value after t = " + std::to_string(t0));
    }
  }
  std::copy(buf, buf + n, psi.values.begin());
  psi.time = t0 + static_cast<double>(steps) * dt;
}

ComplexField schrodinger_step(const ComplexField& psi, const PotentialModel& potential,
                              const EvolverSettings& settings, double t) {
  SchrodingerEvolver evolver(psi.axis, potential, settings);
  ComplexField out = psi;
  out.time = t;
  evolver.step(out);
  return out;
}

PhaseField wigner_transform(const ComplexField& psi, const AxisGrid& p_axis, double hbar,
                            double* imaginary_residue) {
  if (!(hbar > 0.0)) throw ConfigError("wigner_transform: hbar must be positive");
  const AxisGrid& x_axis = psi.axis;
  const std::size_t nx = x_axis.count();
  const std::size_t np = p_axis.count();
  if (psi.values.size() != nx) throw NumericalError("wigner_transform: wave function size mismatch");
  const double dy = std::numbers::pi * hbar / (static_cast<double>(np) * p_axis.spacing());
  const long half = static_cast<long>(np / 2);

  // The p axis has to hold the momentum content of psi, otherwise f_W
  // aliases in p.
  {
    ComplexLineTransform line(nx);
    std::copy(psi.values.begin(), psi.values.end(), line.data());
    line.forward();
    double total = 0.0;
    double outside = 0.0;
    for (std::size_t m = 0; m < nx; ++m) {
      const double w = std::norm(line.data()[m]);
      const double p = hbar * x_axis.frequency(m);
      total += w;
      if (p < p_axis.minimum() || p >= p_axis.maximum()) outside += w;
    }
    if (outside > 1e-8 * total) {
      throw ConfigError("wigner_transform: psi has momentum content outside the p axis");
    }
  }

  // psi is zero-padded before shifting so that psi(x + y) for |y| <= y_max
  // never wraps around the periodic box onto the other edge.
  const double y_max = static_cast<double>(half) * dy;
  std::size_t pad = 2;
  while (static_cast<double>(pad - 1) * x_axis.length() < 2.0 * y_max) pad *= 2;
  const std::size_t nw = pad * nx;
  const std::size_t offset = (nw - nx) / 2;
  const AxisGrid wide(x_axis.minimum() - static_cast<double>(offset) * x_axis.spacing(),
                      x_axis.minimum() + static_cast<double>(nw - offset) * x_axis.spacing(), nw);
  ComplexLineTransform line(nw);
  std::fill(line.data(), line.data() + nw, Complex(0.0));
  std::copy(psi.values.begin(), psi.values.end(), line.data() + offset);
  line.forward();
  const std::vector<Complex> spectrum(line.data(), line.data() + nw);

  // shifted[n + half][j] = psi(x_j + n dy) for n in [-half, half].
  std::vector<Complex> shifted((np + 1) * nx);
  for (long n = -half; n <= half; ++n) {
    const double y = static_cast<double>(n) * dy;
    Complex* buf = line.data();
    for (std::size_t m = 0; m < nw; ++m) {
      const double k = wide.frequency(m);
      const Complex mult = m == nw / 2 ? Complex(std::cos(k * y), 0.0) : std::polar(1.0, k * y);
      buf[m] = spectrum[m] * mult / static_cast<double>(nw);
    }
    line.inverse();
    std::copy(buf + offset, buf + offset + nx,
              shifted.begin() + static_cast<long>(n + half) * static_cast<long>(nx));
  }
  const auto at = [&](long n, std::size_t j) {
    return shifted[static_cast<std::size_t>(n + half) * nx + j];
  };

  PhaseField f(x_axis, p_axis, psi.time);
  ComplexLineTransform corr(np);
  const double scale = dy / (std::numbers::pi * hbar);
  double residue = 0.0;
  for (std::size_t j = 0; j < nx; ++j) {
    Complex* c = corr.data();
    for (long n = -half + 1; n < half; ++n) {
      const double y = static_cast<double>(n) * dy;
      const Complex g = std::conj(at(n, j)) * at(-n, j);
      const std::size_t bin = static_cast<std::size_t>((n + static_cast<long>(np)) % static_cast<long>(np));
      c[bin] = g * std::polar(1.0, 2.0 * p_axis.minimum() * y / hbar);
    }
    // The unpaired end point n = -np/2 aliases onto +np/2; average the two.
    {
      const double y = -static_cast<double>(half) * dy;
      const Complex g = std::conj(at(-half, j)) * at(half, j);
      c[static_cast<std::size_t>(half)] = (g * std::polar(1.0, 2.0 * p_axis.minimum() * y / hbar)).real();
    }
    corr.inverse();
    for (std::size_t k = 0; k < np; ++k) {
      f.at(j, k) = scale * c[k].real();
      residue = std::max(residue, std::abs(scale * c[k].imag()));
    }
  }
  if (imaginary_residue) *imaginary_residue = residue;
  return f;
}

double position_boundary_mass(const ComplexField& psi, double margin_fraction) {
  const AxisGrid& a = psi.axis;
  const double lo = a.minimum() + margin_fraction * a.length();
  const double hi = a.maximum() - margin_fraction * a.length();
  std::vector<double> picked;
  for (std::size_t j = 0; j < a.count(); ++j) {
    const double left = a.node(j) - 0.5 * a.spacing();
    const double right = a.node(j) + 0.5 * a.spacing();
    const double inside = std::max(0.0, std::min(right, hi) - std::max(left, lo)) / a.spacing();
    picked.push_back((1.0 - inside) * std::norm(psi.values[j]));
  }
  return compensated_sum(picked) * a.spacing();
}

}  // namespace qcc
