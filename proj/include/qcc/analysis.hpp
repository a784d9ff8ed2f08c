#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcc/grid.hpp"
#include "qcc/potential.hpp"

namespace qcc {

struct ParticleEnsemble;

/// Expectation values and central moments (orders 2-4) of one distribution.
struct MomentRecord {
  double t = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double central_x2 = 0.0;
  double central_x3 = 0.0;
  double central_x4 = 0.0;
  double central_p2 = 0.0;
  double central_p3 = 0.0;
  double central_p4 = 0.0;
  double cross_xp = 0.0;
  double energy = 0.0;

  /// Raw moment <x^n> for n <= 4 rebuilt from the mean and central moments.
  double raw_x(int n) const;
  double raw_p2() const { return central_p2 + mean_p * mean_p; }
  bool operator==(const MomentRecord&) const = default;
};

using MomentSeries = std::vector<MomentRecord>;

/// Field quadrature. Throws NumericalError unless the mass is 1 within 1e-6.
MomentRecord compute_moments(const PhaseField& field, const PotentialModel& potential, double t);
/// Sample averages over the ensemble.
MomentRecord compute_moments(const ParticleEnsemble& ensemble, const PotentialModel& potential,
                             double t);
/// Moments of a wave function (position density, momentum density and the
/// symmetrized x-p correlation); identical to the moments of its Wigner
/// function.
MomentRecord compute_moments(const ComplexField& psi, const PotentialModel& potential, double hbar,
                             double t);

/// Residuals of the first members of the moment hierarchy, evaluated with
/// fourth-order centred differences at interior records.
struct MomentResidual {
  double t = 0.0;
  double r1 = 0.0;  // d<x>/dt - <p>/m
  double r2 = 0.0;  // d<p>/dt + <V'(x)>
  double r3 = 0.0;  // d<p^2>/dt + 2<p V'> - 2D (when closable)
  double dp2_dt = 0.0;
  double p_force = 0.0;  // <p V'>, if closable
  bool r3_closed = false;
};

struct ResidualSummary {
  std::vector<MomentResidual> residuals;
  double r1_relative = 0.0;  // max |r1| / rms(<p>/m)
  double r2_relative = 0.0;  // max |r2| / rms(<V'>)
  double r3_relative = 0.0;  // max |r3| / rms(d<p^2>/dt) , closable only
  bool r3_closed = false;    // false if <p V'> needs mixed moments beyond the record
};

ResidualSummary moment_residuals(std::span<const MomentRecord> series,
                                 const PotentialModel& potential, double diffusion);

struct DivergenceOptions {
  double threshold = 0.05;
  std::size_t debounce = 5;

  bool operator==(const DivergenceOptions&) const = default;
};

/// First time at which |<x>_q - <x>_c| exceeds threshold * rms(<x>_c) and
/// stays above it for `debounce` consecutive records.
std::optional<double> divergence_time(std::span<const MomentRecord> quantum,
                                      std::span<const MomentRecord> classical,
                                      const DivergenceOptions& options = {});

struct BreakTimeEstimate {
  double lambda = 0.0;
  double chi = 0.0;
  double delta_p = 0.0;
  double hbar = 0.0;
  double t_hbar = 0.0;
  bool valid = false;  // chi * delta_p / hbar > 1
};

/// t_hbar = ln(chi delta_p / hbar) / lambda.
BreakTimeEstimate break_time(double lambda, double chi, double delta_p, double hbar);

struct ChiEstimate {
  double chi = 0.0;
  double excluded_mass = 0.0;
};

/// sqrt|<V'(x,t) / V'''(x)>| against the x marginal, skipping cells with
/// |V'''| < cutoff. Negative cutoff selects 1e-3 max|V'''| over the domain.
ChiEstimate chi_estimate(const PhaseField& field, const PotentialModel& potential, double t,
                         double cutoff = -1.0);
/// Same, from an x density sampled on `x_axis`.
ChiEstimate chi_estimate(std::span<const double> x_density, const AxisGrid& x_axis,
                         const PotentialModel& potential, double t, double cutoff = -1.0);

/// sqrt(2 D / lambda).
double coherence_scale(double diffusion, double lambda);

/// Integral of |min(f, 0)|.
double wigner_negativity(const PhaseField& field);

/// Ratio -min(f)/max(f), zero for nonnegative fields.
double ringing_ratio(const PhaseField& field);

struct Distance {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// L1 = int |a - b|, L2 = sqrt(int (a - b)^2) * sqrt(cell area).
Distance distribution_distance(const PhaseField& a, const PhaseField& b);

struct SnapshotComparison {
  double t = 0.0;
  Distance distance;
  double negativity_quantum = 0.0;
  double negativity_classical = 0.0;
};

struct ComparisonReport {
  std::optional<double> divergence_time;
  std::optional<double> saturated_discrepancy;
  double reference_rms = 0.0;
  std::vector<double> t;
  std::vector<double> abs_delta_x;
  std::vector<double> abs_delta_p;
  std::vector<SnapshotComparison> snapshots;
  DivergenceOptions options;
};

/// Builds the report from aligned series. The saturated discrepancy is the
/// median of |d<x>| / rms(<x>_c) over the final quarter of the run, and is
/// only reported once a divergence time exists.
ComparisonReport compare_series(std::span<const MomentRecord> quantum,
                                std::span<const MomentRecord> classical,
                                const DivergenceOptions& options = {});

/// Mean of |d<x>| over records with t in [t0, t1].
double mean_abs_delta_x(const ComparisonReport& report, double t0, double t1);

}  // namespace qcc
