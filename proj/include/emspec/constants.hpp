#pragma once

#include <numbers>

namespace emspec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// SI values, CODATA 2018 (all exact since the 2019 redefinition).
//
// The flux quantum is the conventional h/2e. The tuning law
// omega(Phi) = omega_max * sqrt(|cos(2*pi*Phi/Phi_0)|) carries an explicit
// 2*pi, so with this convention the curve has period of exactly one flux
// quantum, as measured.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;             // J s
  double electron_charge = 1.602176634e-19;  // C
  double planck = 6.62607015e-34;            // J s
  double flux_quantum = 2.067833848e-15;     // Wb, h / 2e

  void validate() const;  // throws InvalidInputError
};

}  // namespace emspec
