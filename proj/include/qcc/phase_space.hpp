#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "qcc/fft.hpp"
#include "qcc/potential.hpp"
#include "qcc/state.hpp"

namespace qcc {

enum class Dynamics { quantum, classical };
enum class KernelMode { precomputed, on_the_fly };

/// Strang-split pseudospectral propagator for
///   df/dt = -(p/m) df/dx + [momentum kick] f + D d^2f/dp^2
/// where the kick is either the exact quantum (Moyal) operator or the
/// classical force term. One step is: half stream in x, full kick with
/// diffusion in p at the midpoint time, half stream in x. `advance` fuses
/// adjacent half streams.
///
/// The evolver owns its FFT plans and work buffers; it is not shareable
/// between threads while stepping.
class PhaseSpaceEvolver {
 public:
  PhaseSpaceEvolver(const AxisGrid& x_axis, const AxisGrid& p_axis, const PotentialModel& potential,
                    const EvolverSettings& settings, Dynamics dynamics,
                    KernelMode mode = KernelMode::precomputed);

  void step(PhaseField& field) { advance(field, 1); }
  /// Takes `steps` steps starting at field.time. Throws NumericalError if a
  /// non-finite value appears.
  void advance(PhaseField& field, std::size_t steps);

  const EvolverSettings& settings() const { return settings_; }
  Dynamics dynamics() const { return dynamics_; }

 private:
  void stream(double fraction);
  void kick(double t_mid);
  void check_grid(const PhaseField& field) const;

  AxisGrid x_axis_;
  AxisGrid p_axis_;
  std::unique_ptr<PotentialModel> potential_;
  EvolverSettings settings_;
  Dynamics dynamics_;
  KernelMode mode_;

  // work_ holds f with p contiguous. Transforms run on small batches of
  // lines: rows of work_ directly for the kick, and columns gathered into
  // columns_ (x contiguous) for the stream, so each pass over the field is
  // a single sweep through memory.
  AlignedBuffer<double> work_;
  AlignedBuffer<double> columns_;
  RealLineBatch along_x_;
  RealLineBatch along_p_;
  std::vector<Complex> stream_half_;
  std::vector<Complex> stream_full_;
  std::vector<Complex> kick_static_;   // precomputed mode only
  std::vector<double> diffusion_decay_;  // per s, includes 1/np
  std::vector<Complex> drive_phase_;
};

/// Single Wigner master-equation step from time t.
PhaseField wigner_master_step(const PhaseField& f, const PotentialModel& potential,
                              const EvolverSettings& settings, double t);
/// Single Fokker-Planck step from time t.
PhaseField fokker_planck_step(const PhaseField& f, const PotentialModel& potential,
                              const EvolverSettings& settings, double t);

}  // namespace qcc
