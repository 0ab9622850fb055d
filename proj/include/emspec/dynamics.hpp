// Time-domain mean-field oracle. Integrates the coupled resonator/mechanics
// equations of motion to steady state, optionally with the Kerr term, and
// derives the reflection from the input-output boundary condition
// s11 = (-alpha_in + sqrt(kappa_e) alpha_ss) / alpha_in.
//
// Rotating-frame convention: detunings enter the equations as
// (omega_mode - omega_drive), which is the complex conjugate of the frame
// in which they are usually derived. With this choice the steady-state s11
// equals the frequency-domain model s11_coupled(omega_d) with the
// susceptibility convention of spectra.hpp, and the mean-field Kerr pull is
// +i*chi*|alpha|^2*alpha (a redshift for chi < 0). Magnitudes are identical
// in either frame.
#pragma once

#include <vector>

#include "emspec/ode.hpp"
#include "emspec/types.hpp"

namespace emspec {

struct DriveConfig {
  double omega_d = 0;         // drive (probe) frequency, rad/s
  cdouble amplitude_in = 0;   // input amplitude, sqrt(photons/s)

  void validate() const;
};

struct MeanFieldState {
  cdouble alpha = 0;            // resonator amplitude, sqrt(photons)
  std::vector<cdouble> betas;   // one per mechanical mode, sqrt(phonons)
};

struct SteadyStateOptions {
  // Stop when ||dy/dt|| <= derivative_rtol * rate_scale * ||y||, where
  // rate_scale is the largest linear rate in the generator.
  double derivative_rtol = 1e-8;
  // Fallback cap on model time, settle_factor / min(kappa, gamma_k):
  // the slowest decay sets the settling scale.
  double settle_factor = 50.0;
  Rk45Options ode{};
};

struct SteadyStateResult {
  MeanFieldState state;
  cdouble s11 = 0;
  bool converged = false;
  double residual = 0;            // ||dy/dt|| / (rate_scale * ||y||) at exit
  double elapsed_model_time = 0;  // seconds
};

// Rotating-frame derivative at the given state.
void mean_field_derivative(const MeanFieldState& state, const SystemModel& model,
                           const DriveConfig& drive, bool include_kerr, MeanFieldState& out);

// Integrate from vacuum (or a given state) until the derivative-norm
// criterion triggers or the model-time cap is reached. Non-convergence is
// reported in the result, not thrown. Throws DataError when the reflection
// is undefined (zero input amplitude).
SteadyStateResult integrate_to_steady_state(const SystemModel& model, const DriveConfig& drive,
                                            bool include_kerr,
                                            const SteadyStateOptions& opt = {});
SteadyStateResult integrate_to_steady_state_from(const MeanFieldState& initial,
                                                 const SystemModel& model,
                                                 const DriveConfig& drive, bool include_kerr,
                                                 const SteadyStateOptions& opt = {});

struct KerrShiftPoint {
  double amplitude = 0;    // |alpha_in|, sqrt(photons/s)
  double occupation = 0;   // n_r = |alpha_ss|^2 at the located resonance
  double shift = 0;        // omega_found - omega_r, rad/s
  bool bistable = false;   // hysteresis detected between up/down sweeps
  bool converged = true;
};

struct KerrScanOptions {
  int coarse_points = 61;
  int refine_iterations = 40;
  // Relative occupation difference between up- and down-sweeps that counts
  // as a fold.
  double hysteresis_rtol = 0.05;
  SteadyStateOptions steady{};
};

// For each drive amplitude (ascending), locate the driven resonance as the
// minimum of |s11| over an upward probe scan solved from vacuum, and report
// occupation and frequency shift. Folds are detected by hysteresis between
// warm-started up- and down-sweeps and flagged per point, never fatal.
// Requires chi <= 0; chi == 0 short-circuits to exact zero shifts.
std::vector<KerrShiftPoint> kerr_shift_curve(const SystemModel& model,
                                             const std::vector<double>& drive_amplitudes,
                                             const KerrScanOptions& opt = {});

}  // namespace emspec
