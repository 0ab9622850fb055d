#include "emspec/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emspec/errors.hpp"
#include "emspec/spectra.hpp"

namespace emspec {

double FitResult::value(const std::string& name) const {
  for (std::size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return estimates[static_cast<Eigen::Index>(i)];
  throw InvalidInputError("FitResult: unknown parameter \"" + name + "\"");
}

double FitResult::error(const std::string& name) const {
  for (std::size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return standard_errors[static_cast<Eigen::Index>(i)];
  throw InvalidInputError("FitResult: unknown parameter \"" + name + "\"");
}

namespace {

FitResult package(const LmResult& lm, std::vector<std::string> names) {
  FitResult fit;
  fit.parameter_names = std::move(names);
  fit.estimates = lm.parameters;
  fit.standard_errors = lm.standard_errors;
  fit.covariance = lm.covariance;
  fit.residual_norm = lm.residual_norm;
  fit.gradient_measure = lm.gradient_measure;
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  fit.identifiable = lm.identifiable;
  fit.message = lm.message;
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

// Robust per-point complex noise estimate from successive differences.
// |z1 - z2| for circular complex noise of std sigma is Rayleigh with median
// 1.177 sigma.
double estimate_noise(const std::vector<cdouble>& s11) {
  if (s11.size() < 3) return 0;
  std::vector<double> diffs(s11.size() - 1);
  for (std::size_t i = 0; i + 1 < s11.size(); ++i) diffs[i] = std::abs(s11[i + 1] - s11[i]);
  return median(std::move(diffs)) / 1.1774;
}

struct DipSeed {
  double omega_r;
  double kappa;
  double eta;
};

// Deterministic seeding: dip location -> omega_r, full width at half depth
// of 1-|s11|^2 -> kappa, on-dip phase (or depth) -> eta.
DipSeed locate_dip(const Spectrum& data, ResidualKind kind) {
  const std::size_t n = data.size();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(data.s11[i]);
  std::size_t imin = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (mag[i] < mag[imin]) imin = i;

  const double sigma = estimate_noise(data.s11);
  const double depth = 1.0 - mag[imin] * mag[imin];
  if (depth < std::max(1e-6, 10.0 * sigma))
    throw DataError("no resonance dip detected in spectrum");
  if (imin == 0 || imin + 1 == n)
    throw DataError("resonance dip not interior to the frequency grid");

  double eta;
  if (kind == ResidualKind::Complex) {
    eta = 0.5 * (1.0 + data.s11[imin].real());
  } else {
    eta = 0.5 * (1.0 - mag[imin]);  // undercoupled branch of |2 eta - 1|
  }
  eta = std::clamp(eta, 0.02, 0.98);

  // Half-depth crossings of y = 1 - |s11|^2 around the dip.
  const double half = depth / 2;
  const auto y = [&](std::size_t i) { return 1.0 - mag[i] * mag[i]; };
  double f_left = data.frequency_hz.front();
  for (std::size_t i = imin; i-- > 0;) {
    if (y(i) < half) {
      const double t = (half - y(i)) / (y(i + 1) - y(i));
      f_left = data.frequency_hz[i] + t * (data.frequency_hz[i + 1] - data.frequency_hz[i]);
      break;
    }
  }
  double f_right = data.frequency_hz.back();
  for (std::size_t i = imin + 1; i < n; ++i) {
    if (y(i) < half) {
      const double t = (y(i - 1) - half) / (y(i - 1) - y(i));
      f_right = data.frequency_hz[i - 1] + t * (data.frequency_hz[i] - data.frequency_hz[i - 1]);
      break;
    }
  }
  double width = f_right - f_left;
  const double span = data.frequency_hz.back() - data.frequency_hz.front();
  if (!(width > 0) || width >= span) width = span / 10;
  return {kTwoPi * data.frequency_hz[imin], kTwoPi * width, eta};
}

// Stacks a complex model/Jacobian into real residual rows according to the
// residual kind. partials has one column per parameter.
struct ResidualStacker {
  ResidualKind kind;
  Eigen::Index rows_per_point() const { return kind == ResidualKind::Complex ? 2 : 1; }

  void emit(Eigen::Index point, cdouble model, cdouble datum,
            const std::vector<cdouble>& partials, Eigen::VectorXd& r,
            Eigen::MatrixXd* J) const {
    if (kind == ResidualKind::Complex) {
      const cdouble d = model - datum;
      r[2 * point] = d.real();
      r[2 * point + 1] = d.imag();
      if (J)
        for (std::size_t p = 0; p < partials.size(); ++p) {
          (*J)(2 * point, static_cast<Eigen::Index>(p)) = partials[p].real();
          (*J)(2 * point + 1, static_cast<Eigen::Index>(p)) = partials[p].imag();
        }
    } else {
      const double am = std::abs(model);
      r[point] = am - std::abs(datum);
      if (J) {
        const double safe = std::max(am, 1e-300);
        for (std::size_t p = 0; p < partials.size(); ++p)
          (*J)(point, static_cast<Eigen::Index>(p)) =
              (model.real() * partials[p].real() + model.imag() * partials[p].imag()) / safe;
      }
    }
  }
};

}  // namespace

FitResult fit_bare_resonator(const Spectrum& data, const std::optional<ResonatorParams>& guess,
                             ResidualKind kind, const LmOptions& lm,
                             BareParameterization param) {
  data.validate();
  if (data.size() < 5) throw DataError("fit_bare_resonator: need at least 5 points");

  DipSeed seed{};
  if (guess) {
    guess->validate();
    seed = {guess->omega_r, guess->kappa, guess->eta_e()};
  } else {
    seed = locate_dip(data, kind);
  }

  const std::size_t n = data.size();
  const double f_lo = data.frequency_hz.front(), f_hi = data.frequency_hz.back();
  const double span = kTwoPi * (f_hi - f_lo);
  const ResidualStacker stacker{kind};

  const bool eta_param = (param == BareParameterization::KappaEta);
  const LmFunction fn = [&, eta_param](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                                       Eigen::MatrixXd* J) {
    const double omega_r = p[0], kappa = p[1];
    const double eta = eta_param ? p[2] : p[2] / kappa;
    r.resize(stacker.rows_per_point() * static_cast<Eigen::Index>(n));
    if (J) J->resize(r.size(), 3);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = kTwoPi * data.frequency_hz[i];
      const cdouble chi = 1.0 / cdouble(1.0, 2.0 * (w - omega_r) / kappa);
      const cdouble model = -1.0 + 2.0 * eta * chi;
      const cdouble dchi_domega = chi * chi * cdouble(0, 2.0 / kappa);
      const cdouble dchi_dkappa = chi * chi * cdouble(0, 2.0 * (w - omega_r) / (kappa * kappa));
      std::vector<cdouble> partials(3);
      partials[0] = 2.0 * eta * dchi_domega;
      if (eta_param) {
        partials[1] = 2.0 * eta * dchi_dkappa;
        partials[2] = 2.0 * chi;
      } else {
        partials[1] = 2.0 * eta * dchi_dkappa - 2.0 * chi * (p[2] / (kappa * kappa));
        partials[2] = 2.0 * chi / kappa;
      }
      stacker.emit(static_cast<Eigen::Index>(i), model, data.s11[i], partials, r, J);
    }
  };

  Eigen::VectorXd p0(3);
  p0 << seed.omega_r, seed.kappa, (eta_param ? seed.eta : seed.eta * seed.kappa);
  LmBounds bounds;
  bounds.lower.resize(3);
  bounds.upper.resize(3);
  bounds.lower << kTwoPi * f_lo - span, span * 1e-6, 0.0;
  bounds.upper << kTwoPi * f_hi + span, span * 100.0, eta_param ? 1.0 : span * 100.0;

  const LmResult res = lm_minimize(fn, p0, lm, bounds);

  FitResult fit = package(res, {"omega_r", "kappa", "kappa_e"});
  if (eta_param) {
    // (omega_r, kappa, eta) -> (omega_r, kappa, kappa_e = eta kappa)
    const double kappa = res.parameters[1], eta = res.parameters[2];
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(2, 1) = eta;
    t(2, 2) = kappa;
    fit.estimates[2] = eta * kappa;
    fit.covariance = t * res.covariance * t.transpose();
    for (int j = 0; j < 3; ++j)
      fit.standard_errors[j] = std::sqrt(std::max(fit.covariance(j, j), 0.0));
  }
  return fit;
}

double map_row_frequency(const AnticrossingMap& map, const FluxCalibration& cal,
                         std::size_t row) {
  if (map.flux_units == "V") return voltage_to_frequency(cal, map.flux_axis[row]);
  return flux_tuned_frequency(cal.omega_max, map.flux_axis[row]);
}

namespace {

struct CoupledPoint {
  cdouble model;
  std::vector<cdouble> partials;  // d/d(omega_m, gamma, g, kappa, eta)
};

// Single-mode coupled reflection and its analytic partials in the
// (omega_m, gamma, g, kappa, eta) parameterization.
CoupledPoint coupled_model(double w, double omega_r, double omega_m, double gamma, double g,
                           double kappa, double eta) {
  const cdouble chi_r = 1.0 / cdouble(1.0, 2.0 * (w - omega_r) / kappa);
  const cdouble chi_m = 1.0 / cdouble(1.0, 2.0 * (w - omega_m) / gamma);
  const double coop = 4.0 * g * g / (kappa * gamma);
  const cdouble den = 1.0 + coop * chi_m * chi_r;
  const cdouble num = 2.0 * eta * chi_r;

  const cdouble dchi_r_dkappa = chi_r * chi_r * cdouble(0, 2.0 * (w - omega_r) / (kappa * kappa));
  const cdouble dchi_m_domega = chi_m * chi_m * cdouble(0, 2.0 / gamma);
  const cdouble dchi_m_dgamma = chi_m * chi_m * cdouble(0, 2.0 * (w - omega_m) / (gamma * gamma));

  CoupledPoint out;
  out.model = -1.0 + num / den;
  out.partials.resize(5);
  const cdouble den2 = den * den;
  // omega_m
  out.partials[0] = -num * (coop * chi_r * dchi_m_domega) / den2;
  // gamma: through C and chi_m
  out.partials[1] = -num * (chi_r * (-coop / gamma * chi_m + coop * dchi_m_dgamma)) / den2;
  // g
  out.partials[2] = -num * (8.0 * g / (kappa * gamma) * chi_m * chi_r) / den2;
  // kappa: through chi_r (in num and den) and C
  {
    const cdouble dnum = 2.0 * eta * dchi_r_dkappa;
    const cdouble dden = chi_m * (-coop / kappa * chi_r + coop * dchi_r_dkappa);
    out.partials[3] = (dnum * den - num * dden) / den2;
  }
  // eta
  out.partials[4] = 2.0 * chi_r / den;
  return out;
}

}  // namespace

FitResult fit_anticrossing(const AnticrossingMap& map, const FluxCalibration& cal,
                           const std::optional<AnticrossingGuess>& guess, ResidualKind kind,
                           const LmOptions& lm) {
  map.validate();
  cal.validate();
  const std::size_t nrow = map.rows(), ncol = map.cols();

  std::vector<double> omega_rows(nrow);
  for (std::size_t i = 0; i < nrow; ++i) omega_rows[i] = map_row_frequency(map, cal, i);
  const auto [wr_min_it, wr_max_it] = std::minmax_element(omega_rows.begin(), omega_rows.end());
  const double wr_min = *wr_min_it, wr_max = *wr_max_it;

  double omega_m0, gamma0, g0, kappa0, eta0;
  if (guess) {
    omega_m0 = guess->omega_m;
    gamma0 = guess->gamma;
    g0 = guess->g;
    kappa0 = guess->kappa;
    eta0 = guess->kappa_e / guess->kappa;
    if (!(omega_m0 >= wr_min && omega_m0 <= wr_max))
      throw DataError("anti-crossing not bracketed: flux range does not tune through omega_m");
  } else {
    const double f_center = 0.5 * (map.frequency_hz.front() + map.frequency_hz.back());
    const double wm_pre = kTwoPi * f_center;

    std::size_t far_row = 0, near_row = 0;
    for (std::size_t i = 1; i < nrow; ++i) {
      if (std::abs(omega_rows[i] - wm_pre) > std::abs(omega_rows[far_row] - wm_pre)) far_row = i;
      if (std::abs(omega_rows[i] - wm_pre) < std::abs(omega_rows[near_row] - wm_pre)) near_row = i;
    }
    kappa0 = kTwoPi * (map.frequency_hz.back() - map.frequency_hz.front()) / 2;
    eta0 = 0.5;
    for (const std::size_t row : {far_row, near_row}) {
      try {
        const FitResult bare = fit_bare_resonator(map.row(row), {}, kind);
        kappa0 = bare.value("kappa");
        eta0 = std::clamp(bare.value("kappa_e") / kappa0, 0.02, 0.98);
        break;
      } catch (const DataError&) {
        continue;  // row without a visible dip; try the next candidate
      }
    }

    // The mechanical feature is the narrow structure left after removing
    // the per-row bare response.
    std::size_t best_j = 0;
    double best_res = -1;
    std::vector<std::vector<double>> residual(nrow, std::vector<double>(ncol));
    for (std::size_t i = 0; i < nrow; ++i) {
      const ResonatorParams bare_row{omega_rows[i], kappa0, eta0 * kappa0};
      for (std::size_t j = 0; j < ncol; ++j) {
        const double w = kTwoPi * map.frequency_hz[j];
        residual[i][j] = std::abs(map.at(i, j) - s11_bare(w, bare_row));
        if (residual[i][j] > best_res) {
          best_res = residual[i][j];
          best_j = j;
        }
      }
    }
    omega_m0 = kTwoPi * map.frequency_hz[best_j];
    if (!(omega_m0 >= wr_min && omega_m0 <= wr_max))
      throw DataError("anti-crossing not bracketed: flux range does not tune through omega_m");

    // g seed from the dip separation in the closest-approach row.
    std::size_t closest = 0;
    for (std::size_t i = 1; i < nrow; ++i)
      if (std::abs(omega_rows[i] - omega_m0) < std::abs(omega_rows[closest] - omega_m0))
        closest = i;
    std::vector<std::size_t> minima;
    for (std::size_t j = 1; j + 1 < ncol; ++j) {
      const double a = std::abs(map.at(closest, j));
      if (a < std::abs(map.at(closest, j - 1)) && a < std::abs(map.at(closest, j + 1)))
        minima.push_back(j);
    }
    if (minima.size() >= 2) {
      g0 = kTwoPi * (map.frequency_hz[minima.back()] - map.frequency_hz[minima.front()]) / 2;
    } else {
      g0 = kTwoPi * (map.frequency_hz.back() - map.frequency_hz.front()) / 100;
    }

    // gamma seed from the feature width in the closest row, corrected for
    // readout broadening 4 g^2 / kappa.
    const double half = best_res / 2;
    std::size_t j_lo = best_j, j_hi = best_j;
    while (j_lo > 0 && residual[closest][j_lo] > half) --j_lo;
    while (j_hi + 1 < ncol && residual[closest][j_hi] > half) ++j_hi;
    const double w_feat = kTwoPi * (map.frequency_hz[j_hi] - map.frequency_hz[j_lo]);
    gamma0 = std::max({w_feat - 4 * g0 * g0 / kappa0, w_feat / 10,
                       kTwoPi * (map.frequency_hz[1] - map.frequency_hz[0]) * 0.2});
  }

  const ResidualStacker stacker{kind};
  const Eigen::Index mrows =
      stacker.rows_per_point() * static_cast<Eigen::Index>(nrow * ncol);

  const LmFunction fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    r.resize(mrows);
    if (J) J->resize(mrows, 5);
    Eigen::Index point = 0;
    for (std::size_t i = 0; i < nrow; ++i) {
      for (std::size_t j = 0; j < ncol; ++j, ++point) {
        const double w = kTwoPi * map.frequency_hz[j];
        const CoupledPoint cp =
            coupled_model(w, omega_rows[i], p[0], p[1], p[2], p[3], p[4]);
        stacker.emit(point, cp.model, map.at(i, j), cp.partials, r, J);
      }
    }
  };

  Eigen::VectorXd p0(5);
  p0 << omega_m0, gamma0, g0, kappa0, eta0;
  const double f_span = kTwoPi * (map.frequency_hz.back() - map.frequency_hz.front());
  LmBounds bounds;
  bounds.lower.resize(5);
  bounds.upper.resize(5);
  bounds.lower << kTwoPi * map.frequency_hz.front() - f_span, kTwoPi * 1.0, 0.0, f_span * 1e-6,
      0.0;
  bounds.upper << kTwoPi * map.frequency_hz.back() + f_span, f_span * 10, f_span * 10,
      f_span * 100, 1.0;

  const LmResult res = lm_minimize(fn, p0, lm, bounds);

  FitResult fit = package(res, {"omega_m", "gamma", "g", "kappa", "kappa_e"});
  const double kappa = res.parameters[3], eta = res.parameters[4];
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(5, 5);
  t(4, 3) = eta;
  t(4, 4) = kappa;
  fit.estimates[4] = eta * kappa;
  fit.covariance = t * res.covariance * t.transpose();
  for (int j = 0; j < 5; ++j)
    fit.standard_errors[j] = std::sqrt(std::max(fit.covariance(j, j), 0.0));
  return fit;
}

FitResult fit_flux_calibration(const std::vector<BiasPoint>& points,
                               const std::optional<FluxCalibration>& guess,
                               const LmOptions& lm) {
  if (points.size() < 4)
    throw InvalidInputError("fit_flux_calibration: need at least 4 points");
  double w_max_obs = 0;
  for (const BiasPoint& p : points) {
    if (!std::isfinite(p.bias_v) || !(p.omega_r > 0))
      throw InvalidInputError("fit_flux_calibration: bad point");
    w_max_obs = std::max(w_max_obs, p.omega_r);
  }
  const double scale = w_max_obs;

  const LmFunction fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    const double wmax = p[0], gain = p[1], phi = p[2];
    r.resize(static_cast<Eigen::Index>(points.size()));
    if (J) J->resize(r.size(), 3);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double u = gain * points[i].bias_v + phi;
      const double c = std::cos(u);
      const double w = std::max(std::abs(c), 1e-14);
      const double root = std::sqrt(w);
      r[static_cast<Eigen::Index>(i)] = (wmax * root - points[i].omega_r) / scale;
      if (J) {
        const double droot_du = -(c >= 0 ? 1.0 : -1.0) * std::sin(u) / (2.0 * root);
        (*J)(static_cast<Eigen::Index>(i), 0) = root / scale;
        (*J)(static_cast<Eigen::Index>(i), 1) = wmax * droot_du * points[i].bias_v / scale;
        (*J)(static_cast<Eigen::Index>(i), 2) = wmax * droot_du / scale;
      }
    }
  };

  LmBounds bounds;
  bounds.lower.resize(3);
  bounds.upper.resize(3);
  bounds.lower << w_max_obs * (1.0 - 1e-12), -1e12, -1e3;
  bounds.upper << w_max_obs * 100, 1e12, 1e3;

  LmResult best;
  bool have = false;
  if (guess) {
    guess->validate();
    Eigen::VectorXd p0(3);
    p0 << guess->omega_max, guess->gain, guess->phi_offset;
    best = lm_minimize(fn, p0, lm, bounds);
    have = true;
  } else {
    // Multi-start: invert the arc for trial sweet-spot frequencies, seed
    // (gain, phi) from a straight-line fit of u(V), try both signs.
    for (const double factor : {1.0005, 1.02, 1.1, 1.3, 1.7, 2.5}) {
      const double wmax_try = w_max_obs * factor;
      double sv = 0, su = 0, svv = 0, svu = 0;
      for (const BiasPoint& p : points) {
        const double ratio = std::clamp(std::pow(p.omega_r / wmax_try, 2), -1.0, 1.0);
        const double u = std::acos(ratio);
        sv += p.bias_v;
        su += u;
        svv += p.bias_v * p.bias_v;
        svu += p.bias_v * u;
      }
      const double nn = static_cast<double>(points.size());
      const double det = nn * svv - sv * sv;
      if (std::abs(det) < 1e-300) continue;
      const double a = (nn * svu - sv * su) / det;
      const double b = (su * svv - sv * svu) / det;
      for (const double sign : {1.0, -1.0}) {
        Eigen::VectorXd p0(3);
        p0 << wmax_try, sign * a, sign * b;
        const LmResult trial = lm_minimize(fn, p0, lm, bounds);
        if (!have || trial.residual_norm < best.residual_norm) {
          best = trial;
          have = true;
        }
      }
    }
    if (!have) throw DataError("fit_flux_calibration: seeding failed");
  }

  FitResult fit = package(best, {"omega_max", "gain", "phi_offset"});

  // Points on both sides of a |cos| cusp with no data near it leave the
  // branch assignment ambiguous.
  {
    const double gain = best.parameters[1], phi = best.parameters[2];
    std::vector<double> us(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) us[i] = gain * points[i].bias_v + phi;
    std::sort(us.begin(), us.end());
    std::vector<double> gaps;
    for (std::size_t i = 1; i < us.size(); ++i) gaps.push_back(us[i] - us[i - 1]);
    const double med_gap = median(gaps);
    const double pi = std::numbers::pi;
    const long k_lo = static_cast<long>(std::ceil((us.front() + pi / 2) / pi));
    const long k_hi = static_cast<long>(std::floor((us.back() + pi / 2) / pi));
    for (long k = k_lo; k <= k_hi; ++k) {
      const double cusp = k * pi - pi / 2;
      double nearest = 1e300;
      for (const double u : us) nearest = std::min(nearest, std::abs(u - cusp));
      if (nearest > 2.0 * med_gap && med_gap > 0) {
        fit.message += "; cusp ambiguity: no data bracketing the cusp at u=" +
                       std::to_string(cusp);
        break;
      }
    }
  }
  return fit;
}

FitResult fit_kerr_calibration(const std::vector<PowerShiftPoint>& points, double kerr_chi) {
  if (kerr_chi == 0) throw InvalidInputError("fit_kerr_calibration: chi must be nonzero");
  std::vector<PowerShiftPoint> pts = points;
  for (const PowerShiftPoint& p : pts)
    if (!(p.power >= 0) || !std::isfinite(p.shift))
      throw InvalidInputError("fit_kerr_calibration: bad point");
  std::sort(pts.begin(), pts.end(),
            [](const PowerShiftPoint& a, const PowerShiftPoint& b) { return a.power < b.power; });

  // Weak-regime selection: keep points while the local secant slope stays
  // within 10% of the initial through-origin slope.
  std::vector<PowerShiftPoint> selected;
  double s0 = 0;
  bool have_s0 = false;
  double prev_p = 0, prev_s = 0;
  int kept_nonzero = 0;
  for (const PowerShiftPoint& p : pts) {
    if (p.power == 0) {
      selected.push_back(p);
      continue;
    }
    if (!have_s0) {
      s0 = p.shift / p.power;
      have_s0 = true;
      selected.push_back(p);
      ++kept_nonzero;
      prev_p = p.power;
      prev_s = p.shift;
      continue;
    }
    const double local = (p.shift - prev_s) / (p.power - prev_p);
    if (std::abs(local - s0) > 0.10 * std::abs(s0)) break;
    selected.push_back(p);
    ++kept_nonzero;
    prev_p = p.power;
    prev_s = p.shift;
  }
  if (kept_nonzero < 3)
    throw DataError("fit_kerr_calibration: insufficient linear range (" +
                    std::to_string(kept_nonzero) + " weak-drive points)");

  double spp = 0, sps = 0, max_shift = 0;
  for (const PowerShiftPoint& p : selected) {
    spp += p.power * p.power;
    sps += p.power * p.shift;
    max_shift = std::max(max_shift, std::abs(p.shift));
  }
  const double slope = sps / spp;
  double ss = 0;
  for (const PowerShiftPoint& p : selected) {
    const double res = slope * p.power - p.shift;
    ss += res * res;
  }
  const double dof = static_cast<double>(selected.size()) - 1.0;
  const double var_slope = (dof > 0) ? (ss / dof) / spp : 0.0;

  // Calibration convention delta_omega = chi n / 2.
  const double conv = slope / (kerr_chi / 2.0);
  const double conv_err = std::sqrt(std::max(var_slope, 0.0)) / std::abs(kerr_chi / 2.0);

  FitResult fit;
  fit.parameter_names = {"photons_per_unit_power"};
  fit.estimates = Eigen::VectorXd::Constant(1, conv);
  fit.standard_errors = Eigen::VectorXd::Constant(1, conv_err);
  fit.covariance = Eigen::MatrixXd::Constant(1, 1, conv_err * conv_err);
  fit.residual_norm = (max_shift > 0) ? std::sqrt(ss) / max_shift : 0.0;
  fit.iterations = 1;
  fit.converged = true;
  fit.identifiable = spp > 0;
  fit.message = "through-origin line, delta_omega = chi*n/2 convention; " +
                std::to_string(selected.size()) + "/" + std::to_string(pts.size()) +
                " points in weak regime";
  return fit;
}

Spectrum normalize_spectrum(const Spectrum& raw, const Spectrum& reference) {
  raw.validate();
  reference.validate();
  if (raw.size() != reference.size())
    throw DataError("normalize_spectrum: frequency grids differ in length");
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw.frequency_hz[i] != reference.frequency_hz[i])
      throw DataError("normalize_spectrum: frequency grids differ at index " +
                      std::to_string(i));
  Spectrum out;
  out.frequency_hz = raw.frequency_hz;
  out.s11.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::abs(reference.s11[i]) == 0)
      throw DataError("normalize_spectrum: reference is zero at index " + std::to_string(i));
    out.s11[i] = raw.s11[i] / reference.s11[i];
  }
  return out;
}

std::vector<SurveyRow> mode_survey(const std::vector<LabeledMap>& maps,
                                   const FluxCalibration& cal) {
  std::vector<SurveyRow> rows(maps.size());
  const std::int64_t n = static_cast<std::int64_t>(maps.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    SurveyRow& row = rows[static_cast<std::size_t>(i)];
    row.label = maps[static_cast<std::size_t>(i)].label;
    try {
      row.fit = fit_anticrossing(maps[static_cast<std::size_t>(i)].map, cal);
      row.omega_m = row.fit.value("omega_m");
      row.gamma = row.fit.value("gamma");
      row.g = row.fit.value("g");
      row.q_m = row.gamma > 0 ? row.omega_m / row.gamma : 0;
      const double kappa = row.fit.value("kappa");
      row.cooperativity =
          (kappa > 0 && row.gamma > 0) ? 4 * row.g * row.g / (kappa * row.gamma) : 0;
      row.ok = row.fit.converged;
      if (!row.fit.converged) row.error = "fit did not converge: " + row.fit.message;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace emspec
