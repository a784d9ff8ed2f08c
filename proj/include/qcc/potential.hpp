#pragma once

#include <array>
#include <memory>

#include "qcc/grid.hpp"

namespace qcc {

/// Coefficients c[n] of sum_n c[n] x^n, degree <= 4.
struct Polynomial {
  std::array<double, 5> c{};

  double operator()(double x) const {
    return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
  }
  Polynomial derivative() const {
    return Polynomial{{c[1], 2.0 * c[2], 3.0 * c[3], 4.0 * c[4], 0.0}};
  }
  int degree() const {
    for (int n = 4; n > 0; --n) {
      if (c[n] != 0.0) return n;
    }
    return 0;
  }
};

/// Time-dependent potential V(x, t) = U(x) + x * F(t) with polynomial U.
///
/// All models in this library are polynomial of degree <= 4 with an additive
/// linear drive, which makes the Moyal series terminate and lets the phase
/// space kick factor into a static table times a per-frequency drive phase.
class PotentialModel {
 public:
  virtual ~PotentialModel() = default;

  virtual double mass() const = 0;
  /// Static part U(x).
  virtual Polynomial static_polynomial() const = 0;
  /// Drive coefficient F(t) multiplying x.
  virtual double drive(double t) const = 0;
  /// Natural period used to express run lengths.
  virtual double period() const = 0;
  virtual std::unique_ptr<PotentialModel> clone() const = 0;

  double value(double x, double t) const { return static_polynomial()(x) + x * drive(t); }
  double gradient(double x, double t) const {
    return static_polynomial().derivative()(x) + drive(t);
  }
  double second_derivative(double x, double /*t*/ = 0.0) const {
    return static_polynomial().derivative().derivative()(x);
  }
  double third_derivative(double x) const {
    return static_polynomial().derivative().derivative().derivative()(x);
  }
  /// V'(x, t) as a polynomial in x.
  Polynomial force_polynomial(double t) const {
    Polynomial g = static_polynomial().derivative();
    g.c[0] += drive(t);
    return g;
  }
};

/// H = p^2/2m + B x^4 - A x^2 + Lambda x cos(omega t).
class DrivenDoubleWell final : public PotentialModel {
 public:
  DrivenDoubleWell(double mass, double b, double a, double drive_amplitude, double drive_frequency);
  static DrivenDoubleWell paper_regime();

  double mass() const override { return mass_; }
  Polynomial static_polynomial() const override { return Polynomial{{0.0, 0.0, -a_, 0.0, b_}}; }
  double drive(double t) const override;
  double period() const override;
  std::unique_ptr<PotentialModel> clone() const override {
    return std::make_unique<DrivenDoubleWell>(*this);
  }

  double b() const { return b_; }
  double a() const { return a_; }
  double drive_amplitude() const { return drive_amplitude_; }
  double drive_frequency() const { return drive_frequency_; }

 private:
  double mass_;
  double b_;
  double a_;
  double drive_amplitude_;
  double drive_frequency_;
};

/// V = k x^2 / 2. A negative k gives the inverted (saddle) quadratic.
class HarmonicOracle final : public PotentialModel {
 public:
  HarmonicOracle(double mass, double spring);

  double mass() const override { return mass_; }
  Polynomial static_polynomial() const override { return Polynomial{{0.0, 0.0, 0.5 * k_, 0.0, 0.0}}; }
  double drive(double) const override { return 0.0; }
  /// 2 pi / omega0; throws for k <= 0.
  double period() const override;
  std::unique_ptr<PotentialModel> clone() const override {
    return std::make_unique<HarmonicOracle>(*this);
  }

  double spring() const { return k_; }
  double angular_frequency() const;

 private:
  double mass_;
  double k_;
};

/// V = 0 with an externally chosen reference period.
class FreeParticle final : public PotentialModel {
 public:
  explicit FreeParticle(double mass, double reference_period = 1.0);

  double mass() const override { return mass_; }
  Polynomial static_polynomial() const override { return {}; }
  double drive(double) const override { return 0.0; }
  double period() const override { return period_; }
  std::unique_ptr<PotentialModel> clone() const override {
    return std::make_unique<FreeParticle>(*this);
  }

 private:
  double mass_;
  double period_;
};

/// exp(i dt [V(x + hbar s/2, t) - V(x - hbar s/2, t)] / hbar).
Complex quantum_force_kernel(const PotentialModel& v, double x, double s, double t, double dt,
                             double hbar);

/// exp(i dt s V'(x, t)); the hbar -> 0 limit of quantum_force_kernel.
Complex classical_force_kernel(const PotentialModel& v, double x, double s, double t, double dt);

/// Phase of the static part of the quantum kernel,
/// dt [U(x + hbar s/2) - U(x - hbar s/2)] / hbar, evaluated without
/// cancellation by expanding the odd part of U.
double quantum_static_phase(const Polynomial& u, double x, double s, double dt, double hbar);

}  // namespace qcc
