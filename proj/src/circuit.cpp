#include "emspec/circuit.hpp"

#include <cmath>

#include "emspec/errors.hpp"

namespace emspec {

void PhysicalConstants::validate() const {
  if (!(hbar > 0) || !(electron_charge > 0) || !(planck > 0) || !(flux_quantum > 0))
    throw InvalidInputError("physical constants must be strictly positive");
  // Phi_0 = h / 2e; allow rounding slack in user-supplied tables.
  const double phi0 = planck / (2.0 * electron_charge);
  if (std::abs(flux_quantum - phi0) > 1e-6 * phi0)
    throw InvalidInputError("flux_quantum must equal planck / (2 electron_charge)");
}

void CircuitDesign::validate() const {
  if (!(inductance > 0)) throw InvalidInputError("CircuitDesign: L_r must be > 0");
  if (!(capacitance > 0)) throw InvalidInputError("CircuitDesign: C_r must be > 0");
  if (squid_count < 1) throw InvalidInputError("CircuitDesign: N_SQ must be >= 1");
}

void FluxCalibration::validate() const {
  if (!(omega_max > 0)) throw InvalidInputError("FluxCalibration: omega_max must be > 0");
  if (!std::isfinite(gain) || !std::isfinite(phi_offset))
    throw InvalidInputError("FluxCalibration: gain and phi_offset must be finite");
}

double resonator_frequency(const CircuitDesign& design) {
  design.validate();
  return 1.0 / std::sqrt(design.inductance * design.capacitance);
}

double impedance(const CircuitDesign& design) {
  design.validate();
  return std::sqrt(design.inductance / design.capacitance);
}

double charging_energy(const CircuitDesign& design, const PhysicalConstants& pc) {
  design.validate();
  pc.validate();
  return pc.electron_charge * pc.electron_charge / (2.0 * design.capacitance);
}

double kerr_anharmonicity(const CircuitDesign& design, const PhysicalConstants& pc) {
  const double n = static_cast<double>(design.squid_count);
  return -charging_energy(design, pc) / (pc.hbar * n * n);
}

double flux_tuned_frequency(double omega_max, double flux_quanta) {
  if (!(omega_max > 0)) throw InvalidInputError("flux_tuned_frequency: omega_max must be > 0");
  if (!std::isfinite(flux_quanta))
    throw InvalidInputError("flux_tuned_frequency: flux must be finite");
  return omega_max * std::sqrt(std::abs(std::cos(kTwoPi * flux_quanta)));
}

double voltage_to_frequency(const FluxCalibration& cal, double bias_volts) {
  cal.validate();
  return cal.omega_max * std::sqrt(std::abs(std::cos(cal.gain * bias_volts + cal.phi_offset)));
}

double zero_point_voltage(double omega_r, double capacitance, const PhysicalConstants& pc) {
  if (!(omega_r > 0) || !(capacitance > 0))
    throw InvalidInputError("zero_point_voltage: omega_r and C_r must be > 0");
  pc.validate();
  return std::sqrt(pc.hbar * omega_r / (2.0 * capacitance));
}

}  // namespace emspec
