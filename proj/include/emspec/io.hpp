// File formats. All numeric text is written with 17 significant digits so
// values round-trip exactly. Every writer goes through an atomic
// write-temp-then-rename.
//
//   spectrum CSV   header "frequency_Hz,re_s11,im_s11"
//   map            <stem>.json header {flux_axis, frequency_axis, units, csv}
//                  plus <stem>.csv payload "flux_index,frequency_Hz,re_s11,im_s11"
//   kerr CSV       "drive_amplitude,occupation_n_r,shift_Hz,bistable_flag"
//   survey CSV     "map,omega_m_Hz,gamma_Hz,g_Hz,Q_m,cooperativity,converged,message"
//   design JSON    {"L_r_H", "C_r_F", "N_SQ"}
//   calibration    {"omega_max_Hz", "G_rad_per_V", "phi_offset_rad"}
//   model JSON     {"resonator": {omega_r_Hz, kappa_Hz, kappa_e_Hz},
//                   "kerr_Hz", "modes": [{omega_m_Hz, gamma_Hz, g_Hz}]}
//
// Schema violations in JSON inputs raise InvalidInputError naming the
// field; malformed measurement files raise DataError with a line number.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emspec/circuit.hpp"
#include "emspec/dynamics.hpp"
#include "emspec/fitting.hpp"
#include "emspec/types.hpp"

namespace emspec::io {

void atomic_write_text(const std::filesystem::path& path, const std::string& text);

// ---- CSV ----
std::string spectrum_csv(const Spectrum& s);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

void write_map(const std::filesystem::path& json_path, const AnticrossingMap& map);
AnticrossingMap read_map(const std::filesystem::path& json_path);

std::string kerr_csv(const std::vector<KerrShiftPoint>& points);
void write_kerr_csv(const std::filesystem::path& path, const std::vector<KerrShiftPoint>& points);

void write_survey_csv(const std::filesystem::path& path, const std::vector<SurveyRow>& rows);

std::vector<BiasPoint> read_bias_points_csv(const std::filesystem::path& path);       // bias_V,frequency_Hz
std::vector<PowerShiftPoint> read_power_shift_csv(const std::filesystem::path& path); // power,shift_Hz

// ---- JSON ----
CircuitDesign read_design_json(const std::filesystem::path& path);
FluxCalibration read_calibration_json(const std::filesystem::path& path);
void write_calibration_json(const std::filesystem::path& path, const FluxCalibration& cal);
SystemModel read_model_json(const std::filesystem::path& path);
void write_model_json(const std::filesystem::path& path, const SystemModel& model);

// kind: "bare", "anticrossing", "fluxcal", or "kerrcal"; controls the
// rad/s -> Hz conversion table for parameters and covariance.
std::string fit_result_json(const FitResult& fit, const std::string& kind);
void write_fit_result_json(const std::filesystem::path& path, const FitResult& fit,
                           const std::string& kind);

}  // namespace emspec::io
