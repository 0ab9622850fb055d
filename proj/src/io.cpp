#include "emspec/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emspec/constants.hpp"
#include "emspec/errors.hpp"
#include "emspec/version.hpp"

namespace emspec::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InvalidInputError("malformed JSON in " + path.string());
  return j;
}

double require_number(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field))
    throw InvalidInputError(where + ": missing field \"" + std::string(field) + "\"");
  if (!j[field].is_number())
    throw InvalidInputError(where + ": field \"" + std::string(field) + "\" must be a number");
  return j[field].get<double>();
}

// Splits one CSV line into exactly `n` doubles.
void parse_doubles(const std::string& line, std::size_t lineno, double* out, std::size_t n,
                   const std::string& where) {
  const char* p = line.c_str();
  for (std::size_t k = 0; k < n; ++k) {
    char* end = nullptr;
    out[k] = std::strtod(p, &end);
    if (end == p)
      throw DataError(where + ": bad number on line " + std::to_string(lineno));
    p = end;
    if (k + 1 < n) {
      if (*p != ',')
        throw DataError(where + ": expected ',' on line " + std::to_string(lineno));
      ++p;
    }
  }
  while (*p == '\r' || *p == ' ') ++p;
  if (*p != '\0')
    throw DataError(where + ": trailing characters on line " + std::to_string(lineno));
}

std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string spectrum_csv(const Spectrum& s) {
  s.validate();
  if (s.size() < 2) throw InvalidInputError("spectrum file format needs >= 2 points");
  std::string text = "frequency_Hz,re_s11,im_s11\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    text += fmt(s.frequency_hz[i]);
    text += ',';
    text += fmt(s.s11[i].real());
    text += ',';
    text += fmt(s.s11[i].imag());
    text += '\n';
  }
  return text;
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  atomic_write_text(path, spectrum_csv(s));
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(read_file(path));
  if (lines.empty() || lines[0] != "frequency_Hz,re_s11,im_s11")
    throw DataError(path.string() + ": missing spectrum header");
  Spectrum s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    double v[3];
    parse_doubles(lines[i], i + 1, v, 3, path.string());
    s.frequency_hz.push_back(v[0]);
    s.s11.emplace_back(v[1], v[2]);
  }
  if (s.size() < 2) throw DataError(path.string() + ": fewer than 2 data rows");
  s.validate();
  return s;
}

void write_map(const std::filesystem::path& json_path, const AnticrossingMap& map) {
  map.validate();
  const std::filesystem::path csv_path = std::filesystem::path(json_path).replace_extension(".csv");

  json header;
  header["flux_axis"] = map.flux_axis;
  header["frequency_axis"] = map.frequency_hz;
  header["units"] = map.flux_units;
  header["crossing_warning"] = map.crossing_warning;
  header["csv"] = csv_path.filename().string();
  atomic_write_text(json_path, header.dump(2) + "\n");

  std::string text = "flux_index,frequency_Hz,re_s11,im_s11\n";
  for (std::size_t i = 0; i < map.rows(); ++i) {
    for (std::size_t j = 0; j < map.cols(); ++j) {
      text += std::to_string(i);
      text += ',';
      text += fmt(map.frequency_hz[j]);
      text += ',';
      text += fmt(map.at(i, j).real());
      text += ',';
      text += fmt(map.at(i, j).imag());
      text += '\n';
    }
  }
  atomic_write_text(csv_path, text);
}

AnticrossingMap read_map(const std::filesystem::path& json_path) {
  json header;
  {
    std::ifstream in(json_path);
    if (!in) throw DataError("cannot open " + json_path.string());
    header = json::parse(in, nullptr, false);
    if (header.is_discarded())
      throw DataError("malformed JSON header in " + json_path.string());
  }
  AnticrossingMap map;
  try {
    map.flux_axis = header.at("flux_axis").get<std::vector<double>>();
    map.frequency_hz = header.at("frequency_axis").get<std::vector<double>>();
    map.flux_units = header.at("units").get<std::string>();
    map.crossing_warning = header.value("crossing_warning", false);
  } catch (const json::exception& e) {
    throw DataError(json_path.string() + ": bad map header: " + e.what());
  }
  const std::string csv_name = header.value("csv", "");
  if (csv_name.empty()) throw DataError(json_path.string() + ": missing \"csv\" field");
  const std::filesystem::path csv_path = json_path.parent_path() / csv_name;

  const std::vector<std::string> lines = read_lines(read_file(csv_path));
  if (lines.empty() || lines[0] != "flux_index,frequency_Hz,re_s11,im_s11")
    throw DataError(csv_path.string() + ": missing map header row");
  const std::size_t expected = map.flux_axis.size() * map.frequency_hz.size();
  if (lines.size() - 1 != expected)
    throw DataError(csv_path.string() + ": expected " + std::to_string(expected) +
                    " data rows, found " + std::to_string(lines.size() - 1));
  map.s11.resize(expected);
  std::size_t cursor = 0;
  for (std::size_t i = 1; i < lines.size(); ++i, ++cursor) {
    double v[4];
    parse_doubles(lines[i], i + 1, v, 4, csv_path.string());
    const std::size_t row = cursor / map.frequency_hz.size();
    if (static_cast<std::size_t>(v[0]) != row)
      throw DataError(csv_path.string() + ": unexpected flux_index on line " +
                      std::to_string(i + 1));
    map.s11[cursor] = cdouble(v[2], v[3]);
  }
  map.validate();
  return map;
}

std::string kerr_csv(const std::vector<KerrShiftPoint>& points) {
  std::string text = "drive_amplitude,occupation_n_r,shift_Hz,bistable_flag\n";
  for (const KerrShiftPoint& p : points) {
    text += fmt(p.amplitude);
    text += ',';
    text += fmt(p.occupation);
    text += ',';
    text += fmt(p.shift / kTwoPi);
    text += ',';
    text += p.bistable ? '1' : '0';
    text += '\n';
  }
  return text;
}

void write_kerr_csv(const std::filesystem::path& path,
                    const std::vector<KerrShiftPoint>& points) {
  atomic_write_text(path, kerr_csv(points));
}

void write_survey_csv(const std::filesystem::path& path, const std::vector<SurveyRow>& rows) {
  std::string text = "map,omega_m_Hz,gamma_Hz,g_Hz,Q_m,cooperativity,converged,message\n";
  for (const SurveyRow& r : rows) {
    text += r.label;
    text += ',';
    if (r.ok || r.fit.estimates.size() == 5) {
      text += fmt(r.omega_m / kTwoPi);
      text += ',';
      text += fmt(r.gamma / kTwoPi);
      text += ',';
      text += fmt(r.g / kTwoPi);
      text += ',';
      text += fmt(r.q_m);
      text += ',';
      text += fmt(r.cooperativity);
    } else {
      text += ",,,,";
    }
    text += ',';
    text += r.ok ? '1' : '0';
    text += ',';
    std::string msg = r.ok ? r.fit.message : r.error;
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    text += msg;
    text += '\n';
  }
  atomic_write_text(path, text);
}

std::vector<BiasPoint> read_bias_points_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(read_file(path));
  if (lines.empty() || lines[0] != "bias_V,frequency_Hz")
    throw DataError(path.string() + ": missing header \"bias_V,frequency_Hz\"");
  std::vector<BiasPoint> pts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    double v[2];
    parse_doubles(lines[i], i + 1, v, 2, path.string());
    pts.push_back(BiasPoint{v[0], kTwoPi * v[1]});
  }
  return pts;
}

std::vector<PowerShiftPoint> read_power_shift_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(read_file(path));
  if (lines.empty() || lines[0] != "power,shift_Hz")
    throw DataError(path.string() + ": missing header \"power,shift_Hz\"");
  std::vector<PowerShiftPoint> pts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    double v[2];
    parse_doubles(lines[i], i + 1, v, 2, path.string());
    pts.push_back(PowerShiftPoint{v[0], kTwoPi * v[1]});
  }
  return pts;
}

CircuitDesign read_design_json(const std::filesystem::path& path) {
  const json j = parse_json_input(path);
  CircuitDesign d;
  d.inductance = require_number(j, "L_r_H", path.string());
  d.capacitance = require_number(j, "C_r_F", path.string());
  if (!j.contains("N_SQ"))
    throw InvalidInputError(path.string() + ": missing field \"N_SQ\"");
  if (!j["N_SQ"].is_number_integer())
    throw InvalidInputError(path.string() + ": field \"N_SQ\" must be an integer");
  d.squid_count = j["N_SQ"].get<int>();
  d.validate();
  return d;
}

FluxCalibration read_calibration_json(const std::filesystem::path& path) {
  const json j = parse_json_input(path);
  FluxCalibration cal;
  cal.omega_max = kTwoPi * require_number(j, "omega_max_Hz", path.string());
  cal.gain = require_number(j, "G_rad_per_V", path.string());
  cal.phi_offset = require_number(j, "phi_offset_rad", path.string());
  cal.validate();
  return cal;
}

void write_calibration_json(const std::filesystem::path& path, const FluxCalibration& cal) {
  json j;
  j["omega_max_Hz"] = cal.omega_max / kTwoPi;
  j["G_rad_per_V"] = cal.gain;
  j["phi_offset_rad"] = cal.phi_offset;
  atomic_write_text(path, j.dump(2) + "\n");
}

SystemModel read_model_json(const std::filesystem::path& path) {
  const json j = parse_json_input(path);
  if (!j.contains("resonator"))
    throw InvalidInputError(path.string() + ": missing field \"resonator\"");
  const json& r = j["resonator"];
  SystemModel model;
  model.resonator.omega_r = kTwoPi * require_number(r, "omega_r_Hz", path.string());
  model.resonator.kappa = kTwoPi * require_number(r, "kappa_Hz", path.string());
  model.resonator.kappa_e = kTwoPi * require_number(r, "kappa_e_Hz", path.string());
  model.kerr = kTwoPi * (j.contains("kerr_Hz") ? require_number(j, "kerr_Hz", path.string()) : 0.0);
  if (j.contains("modes")) {
    if (!j["modes"].is_array())
      throw InvalidInputError(path.string() + ": field \"modes\" must be an array");
    for (const json& m : j["modes"]) {
      MechanicalMode mode;
      mode.omega_m = kTwoPi * require_number(m, "omega_m_Hz", path.string());
      mode.gamma = kTwoPi * require_number(m, "gamma_Hz", path.string());
      mode.g = kTwoPi * require_number(m, "g_Hz", path.string());
      model.modes.push_back(mode);
    }
  }
  try {
    model.validate();
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
  return model;
}

void write_model_json(const std::filesystem::path& path, const SystemModel& model) {
  model.validate();
  json j;
  j["resonator"] = {{"omega_r_Hz", model.resonator.omega_r / kTwoPi},
                    {"kappa_Hz", model.resonator.kappa / kTwoPi},
                    {"kappa_e_Hz", model.resonator.kappa_e / kTwoPi}};
  j["kerr_Hz"] = model.kerr / kTwoPi;
  j["modes"] = json::array();
  for (const MechanicalMode& m : model.modes)
    j["modes"].push_back({{"omega_m_Hz", m.omega_m / kTwoPi},
                          {"gamma_Hz", m.gamma / kTwoPi},
                          {"g_Hz", m.g / kTwoPi}});
  atomic_write_text(path, j.dump(2) + "\n");
}

namespace {

// Per-kind conversion of internal rad/s values to the file units.
std::vector<std::pair<std::string, double>> json_parameter_table(const FitResult& fit,
                                                                 const std::string& kind) {
  std::vector<std::pair<std::string, double>> table;
  const double inv2pi = 1.0 / kTwoPi;
  for (const std::string& name : fit.parameter_names) {
    if (kind == "fluxcal") {
      if (name == "omega_max")
        table.emplace_back("omega_max_Hz", inv2pi);
      else if (name == "gain")
        table.emplace_back("G_rad_per_V", 1.0);
      else
        table.emplace_back("phi_offset_rad", 1.0);
    } else if (kind == "kerrcal") {
      table.emplace_back(name, 1.0);
    } else {
      table.emplace_back(name + "_Hz", inv2pi);
    }
  }
  return table;
}

}  // namespace

std::string fit_result_json(const FitResult& fit, const std::string& kind) {
  const auto table = json_parameter_table(fit, kind);
  json j;
  j["kind"] = kind;
  j["tool_version"] = kVersion;
  j["converged"] = fit.converged;
  j["identifiable"] = fit.identifiable;
  j["iterations"] = fit.iterations;
  j["residual_norm"] = fit.residual_norm;
  j["gradient_measure"] = fit.gradient_measure;
  j["message"] = fit.message;
  json params = json::array();
  std::vector<std::string> order;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& [name, scale] = table[i];
    order.push_back(name);
    params.push_back({{"name", name},
                      {"value", fit.estimates[static_cast<Eigen::Index>(i)] * scale},
                      {"stderr", fit.standard_errors[static_cast<Eigen::Index>(i)] * scale}});
  }
  j["parameters"] = params;
  j["parameter_order"] = order;
  json cov = json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < table.size(); ++k)
      row.push_back(fit.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                    table[i].second * table[k].second);
    cov.push_back(row);
  }
  j["covariance"] = cov;
  return j.dump(2) + "\n";
}

void write_fit_result_json(const std::filesystem::path& path, const FitResult& fit,
                           const std::string& kind) {
  atomic_write_text(path, fit_result_json(fit, kind));
}

}  // namespace emspec::io
