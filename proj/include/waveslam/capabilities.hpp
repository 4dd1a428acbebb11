#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waveslam/aoa_estimator.hpp"
#include "waveslam/profile.hpp"
#include "waveslam/report.hpp"

namespace waveslam {

enum class CapabilityMode { distance, angle };

CapabilityMode parse_capability_mode(const std::string& text);
std::string to_string(CapabilityMode mode);

struct CapabilityOptions {
  CapabilityMode mode = CapabilityMode::distance;
  NoiseProfile profile = NoiseProfile::noiseless();
  std::uint64_t seed = 1;
  int trials = 50;
  int ftm_n = 8;
  ArrayGeometry array;
  EstimatorConfig estimator;
  // Empty means the standard sweep: {1,3,5,7} m facing the wall in distance
  // mode; {1,3,5} m by -40..40 deg in angle mode.
  std::vector<double> distances_m;
  std::vector<double> angles_deg;
};

struct CapabilityTrial {
  double wall_distance_m = 0.0;
  double angle_deg = 0.0;
  double distance_error_m = 0.0;  // one-way: |d_hat - L| / 2
  double azimuth_error_deg = 0.0;
};

struct CapabilityReport {
  CapabilityMode mode = CapabilityMode::distance;
  std::vector<CapabilityTrial> trials;

  // distance_error_m and azimuth_error_deg samples grouped by setting
  // ("d=3" in distance mode, "d=3/a=-40" in angle mode).
  std::vector<ErrorSample> samples() const;
};

// A single brick wall at x = d in front of a robot at the origin whose
// heading is rotated by the sweep angle. Each trial is one FTM burst plus one
// CSI snapshot, estimated exactly as in the mapping pipeline.
CapabilityReport run_capabilities(const CapabilityOptions& options);

}  // namespace waveslam
