#include "waveslam/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace waveslam {

LidarScan simulate_lidar(const Pose& pose, const Scenario& scenario, const LidarConfig& config, Rng& rng) {
  const double beams_exact = 2.0 * std::numbers::pi / config.angular_step;
  const long beam_count = std::lround(beams_exact);
  if (!(config.angular_step > 0.0) || beam_count < 1 || std::abs(beams_exact - beam_count) > 1e-9)
    throw std::invalid_argument("simulate_lidar: angular_step must divide 2*pi");
  if (!(config.max_range > 0.0)) throw std::invalid_argument("simulate_lidar: max_range must be positive");

  LidarScan scan;
  scan.pose_truth = pose;
  scan.sensor_offset = scenario.rig.lidar_offset;
  scan.max_range = config.max_range;
  scan.sigma = config.sigma;
  scan.beams.reserve(static_cast<std::size_t>(beam_count));

  const Vec2 origin = pose.transform(scenario.rig.lidar_offset);
  const auto opaque = [](const Material& m) { return m.lidar_opaque; };
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  constexpr double kMinRange = 1e-3;

  for (long i = 0; i < beam_count; ++i) {
    LidarBeam beam;
    beam.bearing = static_cast<double>(i) * (2.0 * std::numbers::pi / static_cast<double>(beam_count));
    const auto hit = raycast(origin, unit_vector(pose.theta + beam.bearing), scenario.walls, opaque);
    const bool dropped = config.dropout_probability > 0.0 && uniform(rng) < config.dropout_probability;
    if (hit && hit->distance <= config.max_range && !dropped) {
      const double noisy = hit->distance + gaussian(rng, config.sigma);
      beam.range = std::clamp(noisy, kMinRange, config.max_range);
    }
    scan.beams.push_back(beam);
  }
  return scan;
}

OdometryTrack simulate_odometry(std::span<const TimedPose> route, const OdometryNoise& noise, Rng& rng) {
  if (route.empty()) throw std::invalid_argument("simulate_odometry: empty route");
  if (noise.sigma_xy_per_m < 0.0 || noise.sigma_theta_per_rad < 0.0)
    throw std::invalid_argument("simulate_odometry: negative noise");

  OdometryTrack track;
  track.noise = noise;
  track.poses.reserve(route.size());
  track.poses.push_back(route.front());
  Pose belief = route.front().pose;
  for (std::size_t i = 1; i < route.size(); ++i) {
    Pose delta = route[i - 1].pose.between(route[i].pose);
    const double travelled = std::hypot(delta.x, delta.y);
    const double turned = std::abs(delta.theta);
    delta.x += gaussian(rng, noise.sigma_xy_per_m * travelled);
    delta.y += gaussian(rng, noise.sigma_xy_per_m * travelled);
    delta.theta += gaussian(rng, noise.sigma_theta_per_rad * turned);
    belief = belief.compose(delta);
    track.poses.push_back({route[i].t, belief});
  }
  return track;
}

}  // namespace waveslam
