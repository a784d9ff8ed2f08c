#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "qcc/fft.hpp"
#include "qcc/phase_space.hpp"
#include "qcc/potential.hpp"
#include "qcc/state.hpp"

namespace qcc {

/// psi(x) ~ exp(-(x-x0)^2 / (4 var_x) + i p0 x / hbar), unit norm. Only
/// pure unsheared packets: var_x var_p must equal (hbar/2)^2 and cov_xp 0.
ComplexField gaussian_packet(const GaussianInitialState& init, const AxisGrid& axis, double hbar);

/// Split-operator propagator for i hbar dpsi/dt = [p^2/2m + V(x,t)] psi:
/// half potential phase, full kinetic phase in k-space, half potential
/// phase, with V at the step midpoint.
class SchrodingerEvolver {
 public:
  SchrodingerEvolver(const AxisGrid& axis, const PotentialModel& potential,
                     const EvolverSettings& settings);

  void step(ComplexField& psi) { advance(psi, 1); }
  void advance(ComplexField& psi, std::size_t steps);

 private:
  AxisGrid axis_;
  std::unique_ptr<PotentialModel> potential_;
  EvolverSettings settings_;
  ComplexLineTransform fft_;
  std::vector<Complex> kinetic_;  // includes 1/n
  std::vector<Complex> half_potential_;
};

ComplexField schrodinger_step(const ComplexField& psi, const PotentialModel& potential,
                              const EvolverSettings& settings, double t);

/// f_W(x,p) = (1/(pi hbar)) int dy psi*(x+y) psi(x-y) exp(2 i p y / hbar)
/// on the grid (psi.axis x p_axis). The correlation variable y is sampled
/// at pi hbar / (np dp) using spectral shifts of psi, so correlations are
/// resolved out to |2y| < pi hbar / dp. psi is taken as zero outside its box.
///
/// If `imaginary_residue` is non-null it receives max |Im f_W|.
PhaseField wigner_transform(const ComplexField& psi, const AxisGrid& p_axis, double hbar,
                            double* imaginary_residue = nullptr);

/// |psi|^2 integrated over the outer margin band of the axis.
double position_boundary_mass(const ComplexField& psi, double margin_fraction);

}  // namespace qcc
