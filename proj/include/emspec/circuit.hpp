// Closed-form circuit quantities of the flux-tunable SQUID-array resonator:
// resonance frequency, impedance, charging energy, Kerr anharmonicity,
// zero-point voltage, and the flux / bias-voltage tuning laws.
//
// Unit policy: angular frequencies (rad/s) everywhere in memory; file and
// CLI boundaries convert to Hz.
#pragma once

#include "emspec/constants.hpp"

namespace emspec {

// Fabrication-level description from which all resonator quantities derive.
struct CircuitDesign {
  double inductance = 0;   // total Josephson inductance L_r, H
  double capacitance = 0;  // total capacitance C_r, F
  int squid_count = 1;     // SQUIDs in series, >= 1

  void validate() const;
};

// Bias-voltage tuning curve omega(V) = omega_max * sqrt(|cos(G V + phi)|).
struct FluxCalibration {
  double omega_max = 0;   // rad/s, frequency at the flux sweet spot
  double gain = 0;        // rad per volt
  double phi_offset = 0;  // rad

  void validate() const;
};

// omega_r = 1/sqrt(L_r C_r), rad/s.
double resonator_frequency(const CircuitDesign& design);

// Z_r = sqrt(L_r / C_r), ohm.
double impedance(const CircuitDesign& design);

// E_C = e^2 / (2 C_r), joule.
double charging_energy(const CircuitDesign& design, const PhysicalConstants& pc = {});

// chi = -E_C / (hbar N_SQ^2), rad/s; strictly negative.
double kerr_anharmonicity(const CircuitDesign& design, const PhysicalConstants& pc = {});

// omega_max * sqrt(|cos(2 pi Phi_e)|) with Phi_e in units of the flux
// quantum. Periodic with period 1/2 and even in Phi_e.
double flux_tuned_frequency(double omega_max, double flux_quanta);

// Evaluate the bias calibration curve at a voltage, rad/s.
double voltage_to_frequency(const FluxCalibration& cal, double bias_volts);

// V_zp = sqrt(hbar omega_r / (2 C_r)) across the resonator capacitance.
// Reported for documentation output; no fitted quantity depends on it.
double zero_point_voltage(double omega_r, double capacitance, const PhysicalConstants& pc = {});

}  // namespace emspec
