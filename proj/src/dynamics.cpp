#include "emspec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emspec/errors.hpp"

namespace emspec {

void DriveConfig::validate() const {
  if (!(omega_d > 0)) throw InvalidInputError("DriveConfig: omega_d must be > 0");
  if (!std::isfinite(amplitude_in.real()) || !std::isfinite(amplitude_in.imag()))
    throw InvalidInputError("DriveConfig: amplitude_in must be finite");
}

namespace {

// Flattened derivative: y[0] = alpha, y[1..K] = beta_k. See the header for
// the detuning convention.
struct MeanFieldRhs {
  const SystemModel& model;
  const DriveConfig& drive;
  bool include_kerr;

  void operator()(const std::vector<cdouble>& y, std::vector<cdouble>& dy) const {
    const ResonatorParams& r = model.resonator;
    const cdouble alpha = y[0];
    cdouble coupling = 0;
    for (std::size_t k = 0; k < model.modes.size(); ++k) {
      const MechanicalMode& m = model.modes[k];
      const cdouble beta = y[k + 1];
      coupling += m.g * beta;
      dy[k + 1] = (cdouble(0, m.omega_m - drive.omega_d) - m.gamma / 2.0) * beta -
                  cdouble(0, m.g) * alpha;
    }
    cdouble da = (cdouble(0, r.omega_r - drive.omega_d) - r.kappa / 2.0) * alpha -
                 cdouble(0, 1) * coupling + std::sqrt(r.kappa_e) * drive.amplitude_in;
    if (include_kerr) da += cdouble(0, model.kerr) * std::norm(alpha) * alpha;
    dy[0] = da;
  }

  // Largest linear rate in the generator; normalizes the steady-state
  // derivative criterion.
  double rate_scale(const std::vector<cdouble>& y) const {
    const ResonatorParams& r = model.resonator;
    double g_sum = 0, rate_m = 0;
    for (const MechanicalMode& m : model.modes) {
      g_sum += m.g;
      rate_m = std::max(rate_m, m.gamma / 2 + std::abs(m.omega_m - drive.omega_d) + m.g);
    }
    double rate_a = r.kappa / 2 + std::abs(r.omega_r - drive.omega_d) + g_sum;
    if (include_kerr) rate_a += std::abs(model.kerr) * std::norm(y[0]);
    return std::max(rate_a, rate_m);
  }
};

double norm2(const std::vector<cdouble>& v) {
  double acc = 0;
  for (const cdouble& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

}  // namespace

void mean_field_derivative(const MeanFieldState& state, const SystemModel& model,
                           const DriveConfig& drive, bool include_kerr, MeanFieldState& out) {
  model.validate();
  drive.validate();
  if (state.betas.size() != model.modes.size())
    throw InvalidInputError("mean_field_derivative: state/mode count mismatch");
  std::vector<cdouble> y(model.modes.size() + 1), dy(model.modes.size() + 1);
  y[0] = state.alpha;
  std::copy(state.betas.begin(), state.betas.end(), y.begin() + 1);
  MeanFieldRhs{model, drive, include_kerr}(y, dy);
  out.alpha = dy[0];
  out.betas.assign(dy.begin() + 1, dy.end());
}

SteadyStateResult integrate_to_steady_state_from(const MeanFieldState& initial,
                                                 const SystemModel& model,
                                                 const DriveConfig& drive, bool include_kerr,
                                                 const SteadyStateOptions& opt) {
  model.validate();
  drive.validate();
  if (initial.betas.size() != model.modes.size())
    throw InvalidInputError("integrate_to_steady_state: state/mode count mismatch");
  if (std::abs(drive.amplitude_in) == 0)
    throw DataError("undefined reflection: zero input amplitude");

  double rate_min = model.resonator.kappa;
  for (const MechanicalMode& m : model.modes) rate_min = std::min(rate_min, m.gamma);
  const double t_cap = opt.settle_factor / rate_min;

  MeanFieldRhs rhs{model, drive, include_kerr};
  std::vector<cdouble> y(model.modes.size() + 1);
  y[0] = initial.alpha;
  std::copy(initial.betas.begin(), initial.betas.end(), y.begin() + 1);

  SteadyStateResult result;
  double last_residual = std::numeric_limits<double>::infinity();
  const auto monitor = [&](double /*t*/, const std::vector<cdouble>& yy,
                           const std::vector<cdouble>& dyy) {
    const double ny = norm2(yy);
    const double nf = norm2(dyy);
    if (ny == 0) {
      last_residual = (nf == 0) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      last_residual = nf / (rhs.rate_scale(yy) * ny);
    }
    return last_residual <= opt.derivative_rtol;
  };

  const double t_final = rk45_integrate(rhs, y, 0.0, t_cap, opt.ode, monitor);

  result.state.alpha = y[0];
  result.state.betas.assign(y.begin() + 1, y.end());
  result.residual = last_residual;
  result.converged = last_residual <= opt.derivative_rtol;
  result.elapsed_model_time = t_final;
  result.s11 = (-drive.amplitude_in + std::sqrt(model.resonator.kappa_e) * y[0]) /
               drive.amplitude_in;
  return result;
}

SteadyStateResult integrate_to_steady_state(const SystemModel& model, const DriveConfig& drive,
                                            bool include_kerr, const SteadyStateOptions& opt) {
  MeanFieldState vacuum;
  vacuum.betas.assign(model.modes.size(), cdouble(0, 0));
  return integrate_to_steady_state_from(vacuum, model, drive, include_kerr, opt);
}

namespace {

struct ScanSample {
  double abs_s11 = 0;
  double occupation = 0;
  bool converged = false;
};

ScanSample from_vacuum(const SystemModel& model, double omega_d, double amplitude,
                       const SteadyStateOptions& opt) {
  const SteadyStateResult r =
      integrate_to_steady_state(model, DriveConfig{omega_d, amplitude}, true, opt);
  return {std::abs(r.s11), std::norm(r.state.alpha), r.converged};
}

}  // namespace

std::vector<KerrShiftPoint> kerr_shift_curve(const SystemModel& model,
                                             const std::vector<double>& drive_amplitudes,
                                             const KerrScanOptions& opt) {
  model.validate();
  if (!(model.kerr <= 0)) throw InvalidInputError("kerr_shift_curve: requires chi <= 0");
  for (std::size_t i = 0; i < drive_amplitudes.size(); ++i) {
    if (!(drive_amplitudes[i] >= 0))
      throw InvalidInputError("kerr_shift_curve: amplitudes must be >= 0");
    if (i > 0 && drive_amplitudes[i] < drive_amplitudes[i - 1])
      throw InvalidInputError("kerr_shift_curve: amplitudes must be sorted ascending");
  }

  const ResonatorParams& r = model.resonator;
  std::vector<KerrShiftPoint> curve;
  curve.reserve(drive_amplitudes.size());

  for (const double amp : drive_amplitudes) {
    KerrShiftPoint point;
    point.amplitude = amp;
    if (amp == 0) {
      curve.push_back(point);
      continue;
    }
    if (model.kerr == 0) {
      // Linear resonator: the dip sits exactly at omega_r.
      point.occupation = 4.0 * r.kappa_e * amp * amp / (r.kappa * r.kappa);
      curve.push_back(point);
      continue;
    }

    const double n_est = 4.0 * r.kappa_e * amp * amp / (r.kappa * r.kappa);
    const double lo = r.omega_r - (2.5 * std::abs(model.kerr) * n_est + 3.0 * r.kappa);
    const double hi = r.omega_r + 2.0 * r.kappa;
    const int np = std::max(opt.coarse_points, 5);

    // Probe scan solved from vacuum at every point (the branch reachable
    // from the undriven state).
    std::vector<double> grid(static_cast<std::size_t>(np));
    std::vector<ScanSample> cold(grid.size());
    bool all_converged = true;
    for (int i = 0; i < np; ++i) {
      grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (np - 1);
      cold[static_cast<std::size_t>(i)] =
          from_vacuum(model, grid[static_cast<std::size_t>(i)], amp, opt.steady);
      all_converged = all_converged && cold[static_cast<std::size_t>(i)].converged;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < cold.size(); ++i)
      if (cold[i].abs_s11 < cold[best].abs_s11) best = i;

    // Golden-section refinement inside the bracketing pair.
    double a = grid[best > 0 ? best - 1 : best];
    double b = grid[best + 1 < grid.size() ? best + 1 : best];
    double best_w = grid[best];
    ScanSample best_sample = cold[best];
    if (b > a) {
      const double inv_phi = 0.6180339887498949;
      double x1 = b - inv_phi * (b - a);
      double x2 = a + inv_phi * (b - a);
      ScanSample s1 = from_vacuum(model, x1, amp, opt.steady);
      ScanSample s2 = from_vacuum(model, x2, amp, opt.steady);
      for (int it = 0; it < opt.refine_iterations; ++it) {
        if (s1.abs_s11 < s2.abs_s11) {
          b = x2;
          x2 = x1;
          s2 = s1;
          x1 = b - inv_phi * (b - a);
          s1 = from_vacuum(model, x1, amp, opt.steady);
        } else {
          a = x1;
          x1 = x2;
          s1 = s2;
          x2 = a + inv_phi * (b - a);
          s2 = from_vacuum(model, x2, amp, opt.steady);
        }
      }
      const ScanSample& sb = (s1.abs_s11 < s2.abs_s11) ? s1 : s2;
      const double wb = (s1.abs_s11 < s2.abs_s11) ? x1 : x2;
      if (sb.abs_s11 < best_sample.abs_s11) {
        best_sample = sb;
        best_w = wb;
      }
    }

    // Hysteresis detection: warm-started sweeps up and down the same grid.
    std::vector<double> n_up(grid.size()), n_dn(grid.size());
    {
      MeanFieldState y;
      y.betas.assign(model.modes.size(), cdouble(0, 0));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const SteadyStateResult sr = integrate_to_steady_state_from(
            y, model, DriveConfig{grid[i], amp}, true, opt.steady);
        y = sr.state;
        n_up[i] = std::norm(sr.state.alpha);
      }
      y.alpha = 0;
      y.betas.assign(model.modes.size(), cdouble(0, 0));
      for (std::size_t i = grid.size(); i-- > 0;) {
        const SteadyStateResult sr = integrate_to_steady_state_from(
            y, model, DriveConfig{grid[i], amp}, true, opt.steady);
        y = sr.state;
        n_dn[i] = std::norm(sr.state.alpha);
      }
    }
    bool fold = false;
    for (std::size_t i = 0; i < grid.size() && !fold; ++i) {
      const double big = std::max(n_up[i], n_dn[i]);
      if (big > 1e-9 && std::abs(n_up[i] - n_dn[i]) > opt.hysteresis_rtol * big) fold = true;
    }

    point.occupation = best_sample.occupation;
    point.shift = best_w - r.omega_r;
    point.bistable = fold;
    point.converged = all_converged && best_sample.converged;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace emspec
