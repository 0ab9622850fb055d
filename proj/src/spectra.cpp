#include "emspec/spectra.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "emspec/constants.hpp"
#include "emspec/errors.hpp"

namespace emspec {

void ResonatorParams::validate() const {
  if (!(omega_r > 0)) throw InvalidInputError("ResonatorParams: omega_r must be > 0");
  if (!(kappa > 0)) throw InvalidInputError("ResonatorParams: kappa must be > 0");
  if (!(kappa_e >= 0) || !(kappa_e <= kappa))
    throw InvalidInputError("ResonatorParams: kappa_e must lie in [0, kappa]");
}

void MechanicalMode::validate() const {
  if (!(omega_m > 0)) throw InvalidInputError("MechanicalMode: omega_m must be > 0");
  if (!(gamma > 0)) throw InvalidInputError("MechanicalMode: gamma must be > 0");
  if (!(g >= 0)) throw InvalidInputError("MechanicalMode: g must be >= 0");
}

void SystemModel::validate() const {
  resonator.validate();
  for (std::size_t k = 0; k < modes.size(); ++k) {
    modes[k].validate();
    if (k > 0 && !(modes[k].omega_m > modes[k - 1].omega_m))
      throw InvalidInputError("SystemModel: mode frequencies must be strictly increasing");
  }
  if (!(kerr <= 0)) throw InvalidInputError("SystemModel: kerr must be <= 0");
}

void Spectrum::validate() const {
  if (frequency_hz.size() != s11.size())
    throw InvalidInputError("Spectrum: frequency and s11 arrays differ in length");
  if (frequency_hz.empty()) throw InvalidInputError("Spectrum: empty grid");
  for (std::size_t i = 0; i < frequency_hz.size(); ++i) {
    if (!std::isfinite(frequency_hz[i]) || !std::isfinite(s11[i].real()) ||
        !std::isfinite(s11[i].imag()))
      throw InvalidInputError("Spectrum: non-finite entry");
    if (i > 0 && !(frequency_hz[i] > frequency_hz[i - 1]))
      throw InvalidInputError("Spectrum: frequencies must be strictly increasing");
  }
}

Spectrum AnticrossingMap::row(std::size_t i) const {
  Spectrum out;
  out.frequency_hz = frequency_hz;
  out.s11.assign(s11.begin() + static_cast<std::ptrdiff_t>(i * cols()),
                 s11.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols()));
  return out;
}

void AnticrossingMap::validate() const {
  if (flux_axis.empty() || frequency_hz.size() < 2)
    throw InvalidInputError("AnticrossingMap: axes too short");
  for (std::size_t i = 1; i < flux_axis.size(); ++i)
    if (!(flux_axis[i] > flux_axis[i - 1]))
      throw InvalidInputError("AnticrossingMap: flux axis must be strictly increasing");
  for (std::size_t i = 1; i < frequency_hz.size(); ++i)
    if (!(frequency_hz[i] > frequency_hz[i - 1]))
      throw InvalidInputError("AnticrossingMap: frequency axis must be strictly increasing");
  if (s11.size() != rows() * cols())
    throw InvalidInputError("AnticrossingMap: grid size does not match axes");
  if (flux_units != "flux_quanta" && flux_units != "V")
    throw InvalidInputError("AnticrossingMap: units must be \"flux_quanta\" or \"V\"");
}

cdouble resonator_susceptibility(double omega, const ResonatorParams& r) {
  return 1.0 / cdouble(1.0, 2.0 * (omega - r.omega_r) / r.kappa);
}

cdouble mechanical_susceptibility(double omega, const MechanicalMode& m) {
  return 1.0 / cdouble(1.0, 2.0 * (omega - m.omega_m) / m.gamma);
}

cdouble s11_bare(double omega, const ResonatorParams& r) {
  return -1.0 + 2.0 * r.eta_e() * resonator_susceptibility(omega, r);
}

cdouble s11_coupled(double omega, const SystemModel& model) {
  const ResonatorParams& r = model.resonator;
  const cdouble chi_r = resonator_susceptibility(omega, r);
  cdouble denom = 1.0;
  for (const MechanicalMode& m : model.modes) {
    const double coop = 4.0 * m.g * m.g / (r.kappa * m.gamma);
    denom += coop * mechanical_susceptibility(omega, m) * chi_r;
  }
  return -1.0 + 2.0 * r.eta_e() * chi_r / denom;
}

double cooperativity(const MechanicalMode& m, const ResonatorParams& r) {
  if (!(m.gamma > 0) || !(r.kappa > 0))
    throw InvalidInputError("cooperativity: gamma and kappa must be > 0");
  return 4.0 * m.g * m.g / (r.kappa * m.gamma);
}

double quality_factor(const MechanicalMode& m) {
  if (!(m.gamma > 0)) throw InvalidInputError("quality_factor: gamma must be > 0");
  return m.omega_m / m.gamma;
}

namespace {

void check_grid(const std::vector<double>& grid_hz) {
  if (grid_hz.empty()) throw InvalidInputError("evaluate_spectrum: empty grid");
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    if (!std::isfinite(grid_hz[i]))
      throw InvalidInputError("evaluate_spectrum: non-finite grid point");
    if (i > 0 && !(grid_hz[i] > grid_hz[i - 1]))
      throw InvalidInputError("evaluate_spectrum: grid must be strictly increasing");
  }
}

}  // namespace

Spectrum evaluate_spectrum_serial(const SystemModel& model, const std::vector<double>& grid_hz) {
  model.validate();
  check_grid(grid_hz);
  Spectrum out;
  out.frequency_hz = grid_hz;
  out.s11.resize(grid_hz.size());
  for (std::size_t i = 0; i < grid_hz.size(); ++i)
    out.s11[i] = s11_coupled(kTwoPi * grid_hz[i], model);
  return out;
}

Spectrum evaluate_spectrum(const SystemModel& model, const std::vector<double>& grid_hz) {
  model.validate();
  check_grid(grid_hz);
  Spectrum out;
  out.frequency_hz = grid_hz;
  out.s11.resize(grid_hz.size());
  const std::int64_t n = static_cast<std::int64_t>(grid_hz.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.s11[static_cast<std::size_t>(i)] =
        s11_coupled(kTwoPi * grid_hz[static_cast<std::size_t>(i)], model);
  return out;
}

std::array<cdouble, 2> coupled_mode_poles(const ResonatorParams& r, const MechanicalMode& m) {
  r.validate();
  m.validate();
  const double coop = 4.0 * m.g * m.g / (r.kappa * m.gamma);
  // h(w) = chi_r^-1(w) chi_m^-1(w) + C, a quadratic whose zeros are the
  // zeros of 1 + C chi_m chi_r.
  const auto h = [&](cdouble w) {
    const cdouble ir = 1.0 + cdouble(0, 2.0) * (w - r.omega_r) / r.kappa;
    const cdouble im = 1.0 + cdouble(0, 2.0) * (w - m.omega_m) / m.gamma;
    return ir * im + coop;
  };
  const auto dh = [&](cdouble w) {
    const cdouble ir = 1.0 + cdouble(0, 2.0) * (w - r.omega_r) / r.kappa;
    const cdouble im = 1.0 + cdouble(0, 2.0) * (w - m.omega_m) / m.gamma;
    return cdouble(0, 2.0 / r.kappa) * im + ir * cdouble(0, 2.0 / m.gamma);
  };
  const auto newton = [&](cdouble w) {
    for (int it = 0; it < 200; ++it) {
      const cdouble f = h(w);
      const cdouble d = dh(w);
      if (std::abs(d) == 0) break;
      const cdouble step = f / d;
      w -= step;
      if (std::abs(step) < 1e-15 * (std::abs(w) + 1.0)) break;
    }
    return w;
  };
  std::array<cdouble, 2> roots{newton(cdouble(r.omega_r, r.kappa / 2)),
                               newton(cdouble(m.omega_m, m.gamma / 2))};
  // If both seeds fell into the same basin, recover the partner through the
  // root sum of the quadratic.
  const double scale = std::abs(roots[0]) + std::abs(roots[1]);
  if (std::abs(roots[0] - roots[1]) < 1e-12 * scale) {
    const cdouble sum = cdouble(r.omega_r + m.omega_m, (r.kappa + m.gamma) / 2);
    roots[1] = newton(sum - roots[0]);
  }
  return roots;
}

}  // namespace emspec
