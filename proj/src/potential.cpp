#include "qcc/potential.hpp"

#include <cmath>
#include <numbers>

namespace qcc {

DrivenDoubleWell::DrivenDoubleWell(double mass, double b, double a, double drive_amplitude,
                                   double drive_frequency)
    : mass_(mass), b_(b), a_(a), drive_amplitude_(drive_amplitude),
      drive_frequency_(drive_frequency) {
  if (!(mass > 0.0)) throw ConfigError("double well: mass must be positive");
  if (!(b > 0.0)) throw ConfigError("double well: quartic coefficient B must be positive");
  if (!(drive_frequency > 0.0) || !std::isfinite(drive_frequency)) {
    throw ConfigError("double well: drive frequency must be positive and finite");
  }
  if (!std::isfinite(a) || !std::isfinite(drive_amplitude)) {
    throw ConfigError("double well: parameters must be finite");
  }
}

DrivenDoubleWell DrivenDoubleWell::paper_regime() {
  return DrivenDoubleWell(1.0, 0.5, 10.0, 10.0, 6.07);
}

double DrivenDoubleWell::drive(double t) const {
  return drive_amplitude_ * std::cos(drive_frequency_ * t);
}

double DrivenDoubleWell::period() const { return 2.0 * std::numbers::pi / drive_frequency_; }

HarmonicOracle::HarmonicOracle(double mass, double spring) : mass_(mass), k_(spring) {
  if (!(mass > 0.0)) throw ConfigError("harmonic oracle: mass must be positive");
  if (!std::isfinite(spring)) throw ConfigError("harmonic oracle: spring constant must be finite");
}

double HarmonicOracle::angular_frequency() const {
  if (!(k_ > 0.0)) throw ConfigError("harmonic oracle: no oscillation for k <= 0");
  return std::sqrt(k_ / mass_);
}

double HarmonicOracle::period() const { return 2.0 * std::numbers::pi / angular_frequency(); }

FreeParticle::FreeParticle(double mass, double reference_period)
    : mass_(mass), period_(reference_period) {
  if (!(mass > 0.0)) throw ConfigError("free particle: mass must be positive");
  if (!(reference_period > 0.0)) throw ConfigError("free particle: period must be positive");
}

namespace {

// Sum over n of c[n] * 2 * sum_{odd k >= 3} C(n,k) x^(n-k) a^k / hbar, i.e.
// the part of [U(x+a) - U(x-a)]/hbar beyond the leading s U'(x) term, with
// a = hbar s / 2. Only n = 3, 4 contribute for degree <= 4.
double moyal_correction(const Polynomial& u, double x, double s, double hbar) {
  if (u.c[3] == 0.0 && u.c[4] == 0.0) return 0.0;
  const double a = 0.5 * hbar * s;
  const double a3_over_hbar = a * a * a / hbar;
  return 2.0 * a3_over_hbar * (u.c[3] + 4.0 * u.c[4] * x);
}

}  // namespace

double quantum_static_phase(const Polynomial& u, double x, double s, double dt, double hbar) {
  return dt * (s * u.derivative()(x) + moyal_correction(u, x, s, hbar));
}

Complex quantum_force_kernel(const PotentialModel& v, double x, double s, double t, double dt,
                             double hbar) {
  const double phase = dt * (s * v.gradient(x, t) + moyal_correction(v.static_polynomial(), x, s, hbar));
  return std::polar(1.0, phase);
}

Complex classical_force_kernel(const PotentialModel& v, double x, double s, double t, double dt) {
  return std::polar(1.0, dt * (s * v.gradient(x, t) + 0.0));
}

}  // namespace qcc
