// Deterministic, seeded generators of synthetic measurement data: spectra,
// anti-crossing maps, clustered mode sets, and Kerr power sweeps.
//
// Noise model: additive circular complex Gaussian per frequency point.
// sigma is the standard deviation of the complex value (sqrt(E|z|^2)), so
// each quadrature has deviation sigma/sqrt(2). Draws come from the
// counter-based stream in rng.hpp; map rows use child seeds
// CounterRng::derive_seed(seed, row), which makes row-parallel generation
// bit-identical to the serial reference.
#pragma once

#include <cstdint>
#include <vector>

#include "emspec/circuit.hpp"
#include "emspec/constants.hpp"
#include "emspec/dynamics.hpp"
#include "emspec/types.hpp"

namespace emspec {

struct NoiseSpec {
  double sigma = 0;        // complex standard deviation per point
  std::uint64_t seed = 0;

  void validate() const;
};

// Smooth multiplicative background: complex polynomial sum_k c_k x^k with
// x the grid frequency mapped to [-1, 1]. Empty = no background.
struct BackgroundRipple {
  std::vector<cdouble> coefficients;

  bool empty() const { return coefficients.empty(); }
  cdouble eval(double x) const;
};

struct GridSpec {
  double f_start_hz = 0;
  double f_stop_hz = 0;
  int points = 0;

  void validate() const;
  std::vector<double> frequencies() const;
};

struct FluxGridSpec {
  double start = 0;
  double stop = 0;
  int rows = 0;
  std::string units = "flux_quanta";  // or "V"

  void validate() const;
  std::vector<double> values() const;
};

struct SpectrumScenario {
  SystemModel model;
  GridSpec grid;
  NoiseSpec noise;
  BackgroundRipple background;
};

struct MapScenario {
  SystemModel model;
  FluxGridSpec flux;
  GridSpec grid;
  NoiseSpec noise;
  BackgroundRipple background;
};

// model spectrum x background + seeded noise; identical seeds give
// bit-identical output.
Spectrum generate_spectrum(const SpectrumScenario& scenario);

// Rows are spectra at the flux-dependent resonator frequency implied by
// the calibration. Sets crossing_warning when the model has modes but the
// flux range tunes the resonator past none of them. generate_anticrossing_map
// runs rows under OpenMP; the _serial variant is the reference it is tested
// against (bit-identical).
AnticrossingMap generate_anticrossing_map(const MapScenario& scenario,
                                          const FluxCalibration& cal);
AnticrossingMap generate_anticrossing_map_serial(const MapScenario& scenario,
                                                 const FluxCalibration& cal);

// Statistics of a synthetic clustered mode set (the multi-mode survey
// scenario): quality factors ~1e4, couplings ~1e5 Hz, with one optional
// strongly coupled outlier.
struct ClusterStats {
  double q_min = 1.0e4;
  double q_max = 5.0e4;
  double g_typical = kTwoPi * 100e3;     // rad/s
  double g_log_sigma = 0.35;             // lognormal spread of couplings
  bool strong_outlier = true;
  double outlier_g = kTwoPi * 1.6e6;     // rad/s
  int clusters = 3;
  double cluster_spread_frac = 0.01;     // of band width
  double min_separation_hz = 8e6;        // keeps crossings isolable
  ResonatorParams resonator{0, kTwoPi * 11e6, kTwoPi * 6.3e6};  // omega_r set mid-band
  double kerr = 0;
};

// Seeded draw of `count` modes clustered inside [band_lo_hz, band_hi_hz].
SystemModel generate_mode_cluster(int count, double band_lo_hz, double band_hi_hz,
                                  const ClusterStats& stats, std::uint64_t seed);

// Map scenario bracketing the crossing of one mode: flux range solved from
// the calibration so the resonator tunes through omega_m +- band/2, with
// the frequency grid centered on the mode.
MapScenario crossing_map_scenario(const SystemModel& model, const FluxCalibration& cal,
                                  std::size_t mode_index, double band_hz = 25e6,
                                  int rows = 50, int points = 500, NoiseSpec noise = {});

// Kerr shift curve from the dynamics oracle with seeded multiplicative
// noise on the shifts (relative, so zero shifts stay exactly zero).
std::vector<KerrShiftPoint> generate_kerr_sweep(const SystemModel& model,
                                                const std::vector<double>& amplitudes,
                                                const NoiseSpec& noise,
                                                const KerrScanOptions& scan = {});

}  // namespace emspec
