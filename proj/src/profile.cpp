#include "waveslam/profile.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "waveslam/raytrace.hpp"

namespace waveslam {

using Json = nlohmann::ordered_json;

NoiseProfile NoiseProfile::noiseless() {
  NoiseProfile p;
  p.name = "noiseless";
  p.clock = {0.0123, 0.0, 0.1e-9, 0.0};
  p.ftm_reference_gain_db = reference_path_gain_db();
  return p;
}

double reference_path_gain_db() {
  const double lambda = wavelength(kDefaultCarrierHz);
  return 20.0 * std::log10(lambda / (4.0 * std::numbers::pi * 2.0)) - 7.0;
}

ClockModel clock_for_path(const NoiseProfile& profile, std::complex<double> path_gain) {
  ClockModel clock = profile.clock;
  const double amplitude = std::abs(path_gain);
  if (amplitude > 0.0) {
    const double gain_db = 20.0 * std::log10(amplitude);
    clock.jitter_sigma_s *= std::pow(10.0, (profile.ftm_reference_gain_db - gain_db) / 20.0);
  }
  return clock;
}

namespace {

double field(const Json& obj, const char* section, const char* key, const std::string& source) {
  if (!obj.contains(section) || !obj[section].is_object())
    throw ConfigError(fmt::format("{}: missing section '{}'", source, section));
  const Json& s = obj[section];
  if (!s.contains(key) || !s[key].is_number())
    throw ConfigError(fmt::format("{}: field '{}.{}' missing or not a number", source, section, key));
  const double v = s[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(fmt::format("{}: field '{}.{}' not finite", source, section, key));
  return v;
}

}  // namespace

NoiseProfile parse_profile(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("{}: parse error: {}", source, e.what()));
  }
  if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string())
    throw ConfigError(fmt::format("{}: missing 'name'", source));
  NoiseProfile p;
  p.name = doc["name"].get<std::string>();
  p.clock.offset_s = field(doc, "ftm", "offset_s", source);
  p.clock.drift_ppm = field(doc, "ftm", "drift_ppm", source);
  p.clock.quantization_s = field(doc, "ftm", "quantization_s", source);
  p.clock.jitter_sigma_s = field(doc, "ftm", "jitter_sigma_s", source);
  p.ftm_reference_gain_db = field(doc, "ftm", "reference_gain_db", source);
  p.csi_noise_sigma = field(doc, "csi", "noise_sigma", source);
  p.elevation_jitter_sigma = deg2rad(field(doc, "csi", "elevation_jitter_deg", source));
  p.lidar_sigma = field(doc, "lidar", "sigma", source);
  p.lidar_dropout = field(doc, "lidar", "dropout", source);
  p.odometry.sigma_xy_per_m = field(doc, "odometry", "sigma_xy_per_m", source);
  p.odometry.sigma_theta_per_rad = field(doc, "odometry", "sigma_theta_per_rad", source);
  if (p.clock.quantization_s < 0 || p.clock.jitter_sigma_s < 0 || p.csi_noise_sigma < 0 ||
      p.elevation_jitter_sigma < 0 || p.lidar_sigma < 0 || p.lidar_dropout < 0 || p.lidar_dropout > 1 ||
      p.odometry.sigma_xy_per_m < 0 || p.odometry.sigma_theta_per_rad < 0)
    throw ConfigError(fmt::format("{}: noise parameters must be non-negative (dropout in [0, 1])", source));
  return p;
}

std::string serialize_profile(const NoiseProfile& p) {
  Json doc;
  doc["name"] = p.name;
  doc["ftm"] = {{"offset_s", p.clock.offset_s},
                {"drift_ppm", p.clock.drift_ppm},
                {"quantization_s", p.clock.quantization_s},
                {"jitter_sigma_s", p.clock.jitter_sigma_s},
                {"reference_gain_db", p.ftm_reference_gain_db}};
  doc["csi"] = {{"noise_sigma", p.csi_noise_sigma}, {"elevation_jitter_deg", rad2deg(p.elevation_jitter_sigma)}};
  doc["lidar"] = {{"sigma", p.lidar_sigma}, {"dropout", p.lidar_dropout}};
  doc["odometry"] = {{"sigma_xy_per_m", p.odometry.sigma_xy_per_m},
                     {"sigma_theta_per_rad", p.odometry.sigma_theta_per_rad}};
  return doc.dump(2) + "\n";
}

std::filesystem::path profile_directory() {
  if (const char* env = std::getenv("WAVESLAM_PROFILE_DIR")) return env;
  return WAVESLAM_PROFILE_DIR;
}

NoiseProfile load_profile(const std::string& name_or_path) {
  if (name_or_path == "noiseless") return NoiseProfile::noiseless();
  std::filesystem::path path(name_or_path);
  const bool looks_like_path =
      name_or_path.find('/') != std::string::npos || path.extension() == ".json";
  if (!looks_like_path) path = profile_directory() / (name_or_path + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("unknown profile '{}' (looked for {})", name_or_path, path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str(), path.string());
}

}  // namespace waveslam
