// Linear input-output reflection model.
//
// Susceptibility convention: the frequency-domain ("main text") form
// chi(omega) = [2i(omega - omega_0)/width + 1]^-1 is used throughout, so a
// bare pole sits at omega_0 + i*width/2. Magnitudes are independent of this
// choice; phases follow it.
#pragma once

#include <array>
#include <vector>

#include "emspec/types.hpp"

namespace emspec {

// [2i(omega - omega_r)/kappa + 1]^-1; equals 1 on resonance, |.| <= 1.
cdouble resonator_susceptibility(double omega, const ResonatorParams& r);

// [2i(omega - omega_m)/gamma + 1]^-1.
cdouble mechanical_susceptibility(double omega, const MechanicalMode& m);

// Bare reflection -1 + 2 eta_e chi_r(omega).
cdouble s11_bare(double omega, const ResonatorParams& r);

// Multimode reflection
//   -1 + 2 eta_e chi_r / (1 + sum_k C_k chi_m,k chi_r),
// summed over modes in ascending-frequency order. Reduces exactly to
// s11_bare when all couplings vanish. The Kerr coefficient is ignored
// (linear regime).
cdouble s11_coupled(double omega, const SystemModel& model);

// C = 4 g^2 / (kappa gamma).
double cooperativity(const MechanicalMode& m, const ResonatorParams& r);

// Q_m = omega_m / gamma.
double quality_factor(const MechanicalMode& m);

// Vectorized s11_coupled over a strictly increasing grid of probe
// frequencies in Hz. evaluate_spectrum partitions the grid with OpenMP;
// evaluate_spectrum_serial is the reference implementation the parallel
// kernel is tested against (results are bit-identical).
Spectrum evaluate_spectrum(const SystemModel& model, const std::vector<double>& grid_hz);
Spectrum evaluate_spectrum_serial(const SystemModel& model, const std::vector<double>& grid_hz);

// The two complex roots of 1 + C chi_m chi_r, located by Newton iteration.
// With the susceptibility convention above they coincide with the
// eigenvalues of [[omega_r + i kappa/2, g], [g, omega_m + i gamma/2]]
// (the conjugate of the decaying-mode matrix); this is the anti-crossing
// structure of the coupled system.
std::array<cdouble, 2> coupled_mode_poles(const ResonatorParams& r, const MechanicalMode& m);

}  // namespace emspec
