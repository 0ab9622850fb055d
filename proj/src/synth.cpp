#include "emspec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "emspec/errors.hpp"
#include "emspec/rng.hpp"
#include "emspec/spectra.hpp"

namespace emspec {

void NoiseSpec::validate() const {
  if (!(sigma >= 0)) throw InvalidInputError("NoiseSpec: sigma must be >= 0");
}

cdouble BackgroundRipple::eval(double x) const {
  cdouble acc = 0;
  double xk = 1;
  for (const cdouble& c : coefficients) {
    acc += c * xk;
    xk *= x;
  }
  return acc;
}

void GridSpec::validate() const {
  if (!(points >= 2)) throw InvalidInputError("GridSpec: points must be >= 2");
  if (!(f_start_hz < f_stop_hz))
    throw InvalidInputError("GridSpec: f_start_hz must be < f_stop_hz");
  if (!std::isfinite(f_start_hz) || !std::isfinite(f_stop_hz))
    throw InvalidInputError("GridSpec: non-finite range");
}

std::vector<double> GridSpec::frequencies() const {
  validate();
  std::vector<double> f(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    f[static_cast<std::size_t>(i)] =
        f_start_hz + (f_stop_hz - f_start_hz) * i / (points - 1);
  return f;
}

void FluxGridSpec::validate() const {
  if (!(rows >= 1)) throw InvalidInputError("FluxGridSpec: rows must be >= 1");
  if (!(start < stop)) throw InvalidInputError("FluxGridSpec: start must be < stop");
  if (units != "flux_quanta" && units != "V")
    throw InvalidInputError("FluxGridSpec: units must be \"flux_quanta\" or \"V\"");
}

std::vector<double> FluxGridSpec::values() const {
  validate();
  std::vector<double> v(static_cast<std::size_t>(rows));
  if (rows == 1) {
    v[0] = start;
    return v;
  }
  for (int i = 0; i < rows; ++i)
    v[static_cast<std::size_t>(i)] = start + (stop - start) * i / (rows - 1);
  return v;
}

namespace {

// Noiseless row: model x background on the grid.
void fill_row(const SystemModel& model, const std::vector<double>& grid_hz,
              const BackgroundRipple& background, cdouble* out) {
  const double f0 = grid_hz.front(), f1 = grid_hz.back();
  const double mid = 0.5 * (f0 + f1), half = 0.5 * (f1 - f0);
  for (std::size_t j = 0; j < grid_hz.size(); ++j) {
    cdouble v = s11_coupled(kTwoPi * grid_hz[j], model);
    if (!background.empty()) {
      const double x = half > 0 ? (grid_hz[j] - mid) / half : 0.0;
      v *= background.eval(x);
    }
    out[j] = v;
  }
}

void add_noise(const CounterRng& rng, double sigma, cdouble* out, std::size_t count) {
  if (sigma == 0) return;
  const double q = sigma / std::sqrt(2.0);  // per-quadrature deviation
  for (std::size_t j = 0; j < count; ++j) {
    const std::complex<double> z = rng.normal_pair(j);
    out[j] += cdouble(q * z.real(), q * z.imag());
  }
}

}  // namespace

Spectrum generate_spectrum(const SpectrumScenario& scenario) {
  scenario.model.validate();
  scenario.noise.validate();
  Spectrum out;
  out.frequency_hz = scenario.grid.frequencies();
  out.s11.resize(out.frequency_hz.size());
  fill_row(scenario.model, out.frequency_hz, scenario.background, out.s11.data());
  add_noise(CounterRng(scenario.noise.seed), scenario.noise.sigma, out.s11.data(),
            out.s11.size());
  return out;
}

namespace {

AnticrossingMap make_map(const MapScenario& scenario, const FluxCalibration& cal,
                         bool parallel) {
  scenario.model.validate();
  scenario.noise.validate();
  cal.validate();

  AnticrossingMap map;
  map.flux_axis = scenario.flux.values();
  map.frequency_hz = scenario.grid.frequencies();
  map.flux_units = scenario.flux.units;
  map.s11.resize(map.rows() * map.cols());

  std::vector<double> omega_rows(map.rows());
  for (std::size_t i = 0; i < map.rows(); ++i) {
    omega_rows[i] = (map.flux_units == "V")
                        ? voltage_to_frequency(cal, map.flux_axis[i])
                        : flux_tuned_frequency(cal.omega_max, map.flux_axis[i]);
  }

  const std::int64_t nrow = static_cast<std::int64_t>(map.rows());
  const auto build_row = [&](std::int64_t i) {
    SystemModel row_model = scenario.model;
    row_model.resonator.omega_r = omega_rows[static_cast<std::size_t>(i)];
    cdouble* out = map.s11.data() + static_cast<std::size_t>(i) * map.cols();
    fill_row(row_model, map.frequency_hz, scenario.background, out);
    const std::uint64_t row_seed =
        CounterRng::derive_seed(scenario.noise.seed, static_cast<std::uint64_t>(i));
    add_noise(CounterRng(row_seed), scenario.noise.sigma, out, map.cols());
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nrow; ++i) build_row(i);
  } else {
    for (std::int64_t i = 0; i < nrow; ++i) build_row(i);
  }

  if (!scenario.model.modes.empty()) {
    const auto [lo, hi] = std::minmax_element(omega_rows.begin(), omega_rows.end());
    bool crossed = false;
    for (const MechanicalMode& m : scenario.model.modes)
      if (m.omega_m >= *lo && m.omega_m <= *hi) crossed = true;
    map.crossing_warning = !crossed;
  }
  return map;
}

}  // namespace

AnticrossingMap generate_anticrossing_map(const MapScenario& scenario,
                                          const FluxCalibration& cal) {
  return make_map(scenario, cal, true);
}

AnticrossingMap generate_anticrossing_map_serial(const MapScenario& scenario,
                                                 const FluxCalibration& cal) {
  return make_map(scenario, cal, false);
}

SystemModel generate_mode_cluster(int count, double band_lo_hz, double band_hi_hz,
                                  const ClusterStats& stats, std::uint64_t seed) {
  if (count < 0) throw InvalidInputError("generate_mode_cluster: count must be >= 0");
  if (!(band_lo_hz > 0) || !(band_lo_hz < band_hi_hz))
    throw InvalidInputError("generate_mode_cluster: bad band");

  SystemModel model;
  model.resonator = stats.resonator;
  model.resonator.omega_r = kTwoPi * 0.5 * (band_lo_hz + band_hi_hz);
  model.kerr = stats.kerr;
  if (count == 0) {
    model.validate();
    return model;
  }

  const CounterRng rng(seed);
  std::uint64_t ctr = 0;
  const double width = band_hi_hz - band_lo_hz;

  const int ncl = std::max(1, std::min(stats.clusters, count));
  std::vector<double> centers(static_cast<std::size_t>(ncl));
  for (int c = 0; c < ncl; ++c)
    centers[static_cast<std::size_t>(c)] =
        band_lo_hz + width * (0.12 + 0.76 * rng.uniform(ctr++));
  std::sort(centers.begin(), centers.end());

  struct Draw {
    double f_hz, q, g;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double center = centers[static_cast<std::size_t>(k % ncl)];
    const double z = rng.normal_pair(1000 + ctr++).real();
    double f = center + stats.cluster_spread_frac * width * z;
    f = std::clamp(f, band_lo_hz * 1.0001, band_hi_hz * 0.9999);
    const double q = std::exp(rng.uniform(ctr++, std::log(stats.q_min), std::log(stats.q_max)));
    const double zg = rng.normal_pair(2000 + ctr++).real();
    double g = stats.g_typical * std::exp(stats.g_log_sigma * zg);
    draws[static_cast<std::size_t>(k)] = {f, q, g};
  }
  if (stats.strong_outlier)
    draws[static_cast<std::size_t>(count / 2)].g = stats.outlier_g;

  std::sort(draws.begin(), draws.end(),
            [](const Draw& a, const Draw& b) { return a.f_hz < b.f_hz; });
  // Spread pass keeps crossings isolable for the survey fits.
  for (std::size_t k = 1; k < draws.size(); ++k)
    if (draws[k].f_hz - draws[k - 1].f_hz < stats.min_separation_hz)
      draws[k].f_hz = draws[k - 1].f_hz + stats.min_separation_hz;

  for (const Draw& d : draws) {
    const double omega_m = kTwoPi * d.f_hz;
    model.modes.push_back(MechanicalMode{omega_m, omega_m / d.q, d.g});
  }
  model.validate();
  return model;
}

MapScenario crossing_map_scenario(const SystemModel& model, const FluxCalibration& cal,
                                  std::size_t mode_index, double band_hz, int rows, int points,
                                  NoiseSpec noise) {
  model.validate();
  cal.validate();
  if (mode_index >= model.modes.size())
    throw InvalidInputError("crossing_map_scenario: mode index out of range");
  const double f_m = model.modes[mode_index].omega_m / kTwoPi;
  const double f_lo = f_m - band_hz / 2, f_hi = f_m + band_hz / 2;
  if (!(kTwoPi * f_hi < cal.omega_max))
    throw InvalidInputError("crossing_map_scenario: band exceeds the tuning range");

  // Invert omega(phi) = omega_max sqrt(|cos(2 pi phi)|) on the principal
  // branch phi in [0, 1/4], where the curve is decreasing.
  const auto flux_of = [&](double f_hz) {
    const double ratio = std::pow(kTwoPi * f_hz / cal.omega_max, 2);
    return std::acos(std::clamp(ratio, -1.0, 1.0)) / kTwoPi;
  };

  MapScenario scenario;
  scenario.model = model;
  scenario.flux = FluxGridSpec{flux_of(f_hi), flux_of(f_lo), rows, "flux_quanta"};
  scenario.grid = GridSpec{f_lo, f_hi, points};
  scenario.noise = noise;
  return scenario;
}

std::vector<KerrShiftPoint> generate_kerr_sweep(const SystemModel& model,
                                                const std::vector<double>& amplitudes,
                                                const NoiseSpec& noise,
                                                const KerrScanOptions& scan) {
  noise.validate();
  std::vector<KerrShiftPoint> curve = kerr_shift_curve(model, amplitudes, scan);
  if (noise.sigma > 0) {
    const CounterRng rng(noise.seed);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      // Relative noise keeps zero shifts exactly zero.
      curve[i].shift *= 1.0 + noise.sigma * rng.normal_pair(i).real();
    }
  }
  return curve;
}

}  // namespace emspec
