// Shared helpers for the unit and acceptance suites: seeded random model
// generation and paper-style reference parameters.
#pragma once

#include <cmath>
#include <vector>

#include "emspec/constants.hpp"
#include "emspec/rng.hpp"
#include "emspec/types.hpp"

namespace emspec::testing {

// The device parameters quoted throughout: omega_r/2pi = 5.90 GHz,
// kappa/2pi = 11 MHz, kappa_e/2pi = 6.3 MHz, mode at 5.9754 GHz with
// gamma/2pi = 220 kHz and g/2pi = 1.65 MHz, chi/2pi = -2.0 MHz.
inline ResonatorParams paper_resonator() {
  return {kTwoPi * 5.90e9, kTwoPi * 11e6, kTwoPi * 6.3e6};
}

inline MechanicalMode paper_mode() {
  return {kTwoPi * 5.9754e9, kTwoPi * 220e3, kTwoPi * 1.65e6};
}

inline SystemModel paper_model(bool with_mode = true, double kerr = 0) {
  SystemModel m;
  m.resonator = paper_resonator();
  if (with_mode) m.modes.push_back(paper_mode());
  m.kerr = kerr;
  return m;
}

// Random dissipative model with rates bounded so explicit integration to
// steady state stays cheap (gamma_min >= 2pi*0.3 MHz) and conditioning of
// the steady-state criterion stays moderate.
inline SystemModel random_model(const CounterRng& rng, std::uint64_t key, int max_modes = 3) {
  std::uint64_t c = key * 64;
  SystemModel m;
  const double f_r = rng.uniform(c++, 4e9, 8e9);
  const double kappa = kTwoPi * rng.uniform(c++, 2e6, 15e6);
  const double eta = rng.uniform(c++, 0.05, 0.95);
  m.resonator = {kTwoPi * f_r, kappa, eta * kappa};
  const int n_modes = static_cast<int>(rng.uniform(c++, 0.0, max_modes + 0.999));
  double f_m = f_r - rng.uniform(c++, 0.0, 30e6);
  for (int k = 0; k < n_modes; ++k) {
    const double gamma = kTwoPi * rng.uniform(c++, 0.3e6, 1.5e6);
    const double g = kTwoPi * rng.uniform(c++, 0.0, 2.5e6);
    m.modes.insert(m.modes.begin(), MechanicalMode{kTwoPi * f_m, gamma, g});
    f_m -= rng.uniform(c++, 5e6, 25e6);
  }
  return m;
}

}  // namespace emspec::testing
