#pragma once

#include <optional>
#include <span>
#include <vector>

#include "waveslam/environment.hpp"

namespace waveslam {

struct LidarConfig {
  double angular_step = deg2rad(1.0);
  double max_range = 12.0;
  double sigma = 0.02;
  double dropout_probability = 0.0;  // per-bearing, independent
};

struct LidarBeam {
  double bearing = 0.0;          // robot frame, [0, 2π)
  std::optional<double> range;   // nullopt is NO_RETURN
};

struct LidarScan {
  Pose pose_truth;
  Vec2 sensor_offset = Vec2::Zero();  // LiDAR origin in the robot frame
  std::vector<LidarBeam> beams;
  double max_range = 0.0;
  double sigma = 0.0;
};

// One 360° sweep. LiDAR-transparent walls are invisible; hits beyond
// max_range, transparent bearings and dropouts report NO_RETURN.
LidarScan simulate_lidar(const Pose& pose, const Scenario& scenario, const LidarConfig& config, Rng& rng);

struct OdometryNoise {
  double sigma_xy_per_m = 0.0;       // std of each planar increment component per metre travelled
  double sigma_theta_per_rad = 0.0;  // std of the heading increment per radian turned
};

struct OdometryTrack {
  std::vector<TimedPose> poses;
  OdometryNoise noise;
};

// Dead-reckoned belief: true increments perturbed in proportion to distance
// travelled and angle turned, then chained from the exact first pose.
OdometryTrack simulate_odometry(std::span<const TimedPose> route, const OdometryNoise& noise, Rng& rng);

}  // namespace waveslam
