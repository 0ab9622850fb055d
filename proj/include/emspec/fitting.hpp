// Nonlinear least-squares parameter extraction: bare-resonator fits,
// joint anti-crossing fits, flux calibration, and Kerr-shift calibration,
// each with standard errors from the residual-scaled Gauss-Newton Hessian.
//
// Complex spectra are fit on stacked real/imaginary residuals by default
// (phase improves the kappa_e vs kappa_i split); a magnitude-only fallback
// exists for data without calibrated phase. All rates in the in-memory
// results are rad/s; the JSON writers convert to Hz.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "emspec/circuit.hpp"
#include "emspec/levmar.hpp"
#include "emspec/types.hpp"

namespace emspec {

struct FitResult {
  std::vector<std::string> parameter_names;
  Eigen::VectorXd estimates;
  Eigen::VectorXd standard_errors;
  Eigen::MatrixXd covariance;
  double residual_norm = 0;
  double gradient_measure = 0;
  int iterations = 0;
  bool converged = false;
  bool identifiable = true;
  std::string message;

  double value(const std::string& name) const;
  double error(const std::string& name) const;
};

enum class ResidualKind { Complex, Magnitude };

// Internal parameterization of the reflection fits. KappaEta fits
// (kappa, eta_e) and guarantees 0 <= kappa_e <= kappa through the box
// eta_e in [0, 1]; KappaKappaE fits kappa_e directly. Reported parameters
// are identical up to the reparameterization.
enum class BareParameterization { KappaEta, KappaKappaE };

// Fit s11_bare to a spectrum spanning the resonance dip. Returns
// {omega_r, kappa, kappa_e}. Throws DataError when no dip is detected or
// the dip is not interior to the grid.
FitResult fit_bare_resonator(const Spectrum& data,
                             const std::optional<ResonatorParams>& guess = {},
                             ResidualKind kind = ResidualKind::Complex,
                             const LmOptions& lm = {},
                             BareParameterization param = BareParameterization::KappaEta);

struct AnticrossingGuess {
  double omega_m = 0;  // rad/s
  double gamma = 0;
  double g = 0;
  double kappa = 0;
  double kappa_e = 0;
};

// Joint fit of every map row to the single-mode coupled model, with the
// row resonator frequency tied through the flux calibration. Returns
// {omega_m, gamma, g, kappa, kappa_e}. Throws DataError when the map's
// flux range does not bracket the crossing.
FitResult fit_anticrossing(const AnticrossingMap& map, const FluxCalibration& cal,
                           const std::optional<AnticrossingGuess>& guess = {},
                           ResidualKind kind = ResidualKind::Complex,
                           const LmOptions& lm = {});

// Resonator frequency of a map row implied by the flux calibration.
double map_row_frequency(const AnticrossingMap& map, const FluxCalibration& cal,
                         std::size_t row);

struct BiasPoint {
  double bias_v = 0;
  double omega_r = 0;  // rad/s
};

// Fit omega(V) = omega_max sqrt(|cos(G V + phi)|) to bias-frequency
// points. Returns {omega_max, gain, phi_offset}. Needs >= 4 points.
FitResult fit_flux_calibration(const std::vector<BiasPoint>& points,
                               const std::optional<FluxCalibration>& guess = {},
                               const LmOptions& lm = {});

struct PowerShiftPoint {
  double power = 0;  // arbitrary probe-power unit
  double shift = 0;  // measured frequency shift, rad/s (negative for chi<0)
};

// Through-origin line fit of shift vs power restricted to the weak-drive
// regime (points kept while the local slope stays within 10% of the
// initial slope). The photon conversion uses the calibration convention
// delta_omega = chi * n / 2. Returns {photons_per_unit_power}.
// Throws DataError when fewer than three points survive the selection.
FitResult fit_kerr_calibration(const std::vector<PowerShiftPoint>& points, double kerr_chi);

// Pointwise complex division raw/reference on identical grids.
Spectrum normalize_spectrum(const Spectrum& raw, const Spectrum& reference);

struct LabeledMap {
  std::string label;
  AnticrossingMap map;
};

struct SurveyRow {
  std::string label;
  bool ok = false;
  std::string error;
  FitResult fit;
  double omega_m = 0;        // rad/s
  double gamma = 0;
  double g = 0;
  double q_m = 0;
  double cooperativity = 0;
};

// Batch anti-crossing fits, one row per map; per-map failures are recorded
// and the survey continues. Maps are processed in parallel (the result is
// order-preserving and identical to the serial loop).
std::vector<SurveyRow> mode_survey(const std::vector<LabeledMap>& maps,
                                   const FluxCalibration& cal);

}  // namespace emspec
