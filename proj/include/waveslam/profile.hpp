#pragma once

#include <complex>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "waveslam/ftm.hpp"
#include "waveslam/sensors.hpp"

namespace waveslam {

// Bad command-line or configuration input (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Named bundle of every noise source in the simulation.
struct NoiseProfile {
  std::string name;
  ClockModel clock;
  // FTM timestamp jitter is clock.jitter_sigma_s for a path of this
  // amplitude and scales inversely with the dominant path's amplitude.
  double ftm_reference_gain_db = 0.0;
  double csi_noise_sigma = 0.0;
  double elevation_jitter_sigma = 0.0;  // radians
  double lidar_sigma = 0.0;
  double lidar_dropout = 0.0;
  OdometryNoise odometry;

  // All random perturbations off; keeps 0.1 ns timestamp granularity.
  static NoiseProfile noiseless();
};

// Amplitude of a 2 m, single brick bounce path at the default carrier.
double reference_path_gain_db();

// Clock model for a burst locked on a path of the given complex gain.
ClockModel clock_for_path(const NoiseProfile& profile, std::complex<double> path_gain);

NoiseProfile parse_profile(const std::string& text, const std::string& source = "<profile>");
std::string serialize_profile(const NoiseProfile& profile);

// "noiseless" is built in; other names resolve to <profile dir>/<name>.json;
// anything containing a path separator or ending in .json is read as a file.
NoiseProfile load_profile(const std::string& name_or_path);

std::filesystem::path profile_directory();

}  // namespace waveslam
