#include "waveslam/capabilities.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "waveslam/fusion.hpp"
#include "waveslam/pipeline.hpp"
#include "waveslam/raytrace.hpp"

namespace waveslam {

CapabilityMode parse_capability_mode(const std::string& text) {
  if (text == "distance") return CapabilityMode::distance;
  if (text == "angle") return CapabilityMode::angle;
  throw ConfigError(fmt::format("unknown capabilities mode '{}' (expected distance or angle)", text));
}

std::string to_string(CapabilityMode mode) { return mode == CapabilityMode::distance ? "distance" : "angle"; }

std::vector<ErrorSample> CapabilityReport::samples() const {
  std::vector<ErrorSample> out;
  for (const CapabilityTrial& t : trials) {
    const std::string group = mode == CapabilityMode::distance
                                  ? fmt::format("d={}", t.wall_distance_m)
                                  : fmt::format("d={}/a={}", t.wall_distance_m, t.angle_deg);
    out.push_back({"distance_error_m", group, t.distance_error_m});
    out.push_back({"azimuth_error_deg", group, t.azimuth_error_deg});
  }
  return out;
}

CapabilityReport run_capabilities(const CapabilityOptions& options) {
  if (options.trials < 1) throw ConfigError("capabilities: trials must be >= 1");
  if (options.ftm_n < 1 || options.ftm_n > kMaxBurstMeasurements) throw ConfigError("capabilities: ftm n out of range");
  options.array.validate();
  options.estimator.validate();

  std::vector<double> distances = options.distances_m;
  std::vector<double> angles = options.angles_deg;
  if (distances.empty())
    distances = options.mode == CapabilityMode::distance ? std::vector<double>{1, 3, 5, 7} : std::vector<double>{1, 3, 5};
  if (angles.empty()) {
    if (options.mode == CapabilityMode::distance) angles = {0.0};
    else
      for (int a = -40; a <= 40; a += 10) angles.push_back(a);
  }

  const RobotRig rig;
  const Material brick = default_materials().front();
  TraceOptions trace;
  trace.max_order = 1;
  trace.carrier_hz = options.array.carrier_hz;

  CapabilityReport report;
  report.mode = options.mode;
  std::uint64_t index = 0;
  for (double d : distances) {
    const std::vector<WallSegment> walls{{{d, -20.0}, {d, 20.0}, brick}};
    for (double angle : angles) {
      const Pose pose{0.0, 0.0, deg2rad(angle)};
      const Vec2 initiator = pose.transform(rig.initiator_offset);
      const Vec2 responder = pose.transform(rig.responder_offset);
      const auto paths = trace_paths(initiator, responder, pose.theta + rig.array_boresight, walls, trace);
      const RayPath* dominant = dominant_path(paths);
      if (!dominant) throw std::runtime_error(fmt::format("capabilities: no path at d={} angle={}", d, angle));
      const RayPath& truth = *dominant;
      const ClockModel clock = clock_for_path(options.profile, truth.gain);

      for (int k = 0; k < options.trials; ++k, ++index) {
        Rng csi_rng = make_stream(options.seed, index, kCsiStream);
        Rng ftm_rng = make_stream(options.seed, index, kFtmStream);
        const CsiSnapshot csi = synthesize_csi(paths, options.array, options.profile.csi_noise_sigma,
                                               options.profile.elevation_jitter_sigma, csi_rng);
        const auto burst = simulate_burst(truth.delay, options.ftm_n, clock, kDefaultSifs, ftm_rng);
        const RangeEstimate range = RangeEstimate::from_tof(estimate_tof(burst));
        const auto estimates = extract_paths(csi, options.estimator);

        CapabilityTrial trial;
        trial.wall_distance_m = d;
        trial.angle_deg = angle;
        trial.distance_error_m = std::abs(range.distance_m - truth.length()) / 2.0;
        trial.azimuth_error_deg =
            estimates.empty() ? 180.0
                              : rad2deg(std::abs(wrap_angle(strongest_path(estimates).azimuth - truth.azimuth)));
        report.trials.push_back(trial);
      }
    }
  }
  return report;
}

}  // namespace waveslam
