#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "waveslam/aoa_estimator.hpp"
#include "waveslam/environment.hpp"
#include "waveslam/sensors.hpp"

namespace waveslam {

struct RangeEstimate {
  double tof_s = 0.0;
  double distance_m = 0.0;  // d̂ = c·ToF, the full two-leg path length

  static RangeEstimate from_tof(double tof_s) { return {tof_s, kSpeedOfLight * tof_s}; }
};

enum class PointSource { lidar, mmwave };

enum class PointQuality {
  accepted,
  rejected_elevation,
  rejected_range,
  rejected_geometry,
  rejected_consistency,
};

std::string_view to_string(PointSource source);
std::string_view to_string(PointQuality quality);

struct PointEstimate {
  Vec2 xy = Vec2::Zero();
  PointSource source = PointSource::lidar;
  double event_time = 0.0;
  PointQuality quality = PointQuality::accepted;

  bool accepted() const { return quality == PointQuality::accepted; }
};

// First-order reflection point for a bistatic pair: the intersection of the
// ray responder + r·u with the ellipse {P : |P − initiator| + |P − responder| = d̂},
//   r = (d̂² − |B|²) / (2·(d̂ − u·B)),  B = initiator − responder.
// nullopt when d̂ does not exceed the baseline or the denominator vanishes.
std::optional<Vec2> reflection_point(const Vec2& responder_xy, const Vec2& initiator_xy,
                                     double world_bearing, double d_hat);

enum class Gate { elevation, range, azimuth, gain };

struct GateConfig {
  double elevation_max = deg2rad(5.0);
  double range_min = 0.3;  // applies to d̂
  double range_max = 7.0;
  double azimuth_max = deg2rad(40.0);
  std::optional<double> min_gain_db;  // received-power gate, off by default
  std::array<Gate, 4> order{Gate::elevation, Gate::range, Gate::azimuth, Gate::gain};
};

// Gated mmWave point from an odometry pose, an FTM range and the strongest
// AoA estimate. Failures come back as quality codes, never as exceptions.
PointEstimate mmwave_point(const Pose& odom_pose, const RobotRig& rig, const RangeEstimate& range,
                           const PathEstimate& aoa, const GateConfig& gates, double event_time = 0.0);

struct SelectionConfig {
  double sector_width = deg2rad(5.0);
  std::size_t depth = 5;
  double disagreement_threshold_m = 0.30;
};

// Per-sector history of recently emitted ranges for each source.
class SelectionState {
 public:
  explicit SelectionState(SelectionConfig config = {});

  const SelectionConfig& config() const { return config_; }
  int sector_of(double robot_bearing) const;
  int sector_count() const { return sector_count_; }

  void record(int sector, PointSource source, double range);
  const std::deque<double>& history(int sector, PointSource source) const;
  // Median over both sources' buffers in the sector; nullopt when empty.
  std::optional<double> median(int sector) const;

 private:
  SelectionConfig config_;
  int sector_count_;
  std::map<std::pair<int, PointSource>, std::deque<double>> buffers_;
};

struct SelectionOutput {
  std::vector<PointEstimate> points;  // every input point, relabelled; accepted ones are emitted
  SelectionState state;
};

// LiDAR / mmWave point selection, per robot-frame sector:
//  (a) no LiDAR return in the sector: the mmWave point is emitted;
//  (b) both present within the disagreement threshold: both are emitted;
//  (c) otherwise the source closer to the sector's history median wins and
//      the other is marked rejected_consistency (LiDAR wins on empty history).
SelectionOutput select_points(const LidarScan& scan, std::span<const PointEstimate> mmwave_points,
                              SelectionState state, const Pose& odom_pose, double event_time = 0.0);

// LiDAR hits placed in the world through the given pose.
std::vector<PointEstimate> lidar_points(const LidarScan& scan, const Pose& odom_pose, double event_time);

}  // namespace waveslam
