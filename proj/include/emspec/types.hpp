// Core data types shared by the simulation and fitting layers.
#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace emspec {

using cdouble = std::complex<double>;

struct ResonatorParams {
  double omega_r = 0;   // rad/s
  double kappa = 0;     // total linewidth, rad/s
  double kappa_e = 0;   // external linewidth, rad/s, 0 <= kappa_e <= kappa

  double kappa_i() const { return kappa - kappa_e; }
  double eta_e() const { return kappa_e / kappa; }
  void validate() const;
};

struct MechanicalMode {
  double omega_m = 0;  // rad/s
  double gamma = 0;    // linewidth, rad/s
  double g = 0;        // coupling rate to the resonator, rad/s

  void validate() const;
};

// One resonator plus its mechanical modes; the single source of truth for
// simulation and fitting. Mode frequencies are kept strictly increasing.
struct SystemModel {
  ResonatorParams resonator;
  std::vector<MechanicalMode> modes;
  double kerr = 0;  // Kerr anharmonicity chi, rad/s, <= 0

  void validate() const;
};

// Sampled complex reflection on a frequency grid. In memory a single point
// is allowed (scalar evaluations); the file interchange format requires at
// least two points.
struct Spectrum {
  std::vector<double> frequency_hz;  // strictly increasing
  std::vector<cdouble> s11;

  std::size_t size() const { return frequency_hz.size(); }
  void validate() const;
};

// Complex reflection on a flux x frequency grid, stored row-major
// (one row per flux point).
struct AnticrossingMap {
  std::vector<double> flux_axis;     // flux quanta or bias volts, increasing
  std::vector<double> frequency_hz;  // strictly increasing
  std::vector<cdouble> s11;          // rows() * cols(), row-major
  std::string flux_units = "flux_quanta";  // "flux_quanta" or "V"
  bool crossing_warning = false;     // set by generators when no mode is crossed

  std::size_t rows() const { return flux_axis.size(); }
  std::size_t cols() const { return frequency_hz.size(); }
  const cdouble& at(std::size_t row, std::size_t col) const { return s11[row * cols() + col]; }
  cdouble& at(std::size_t row, std::size_t col) { return s11[row * cols() + col]; }
  Spectrum row(std::size_t i) const;
  void validate() const;
};

}  // namespace emspec
