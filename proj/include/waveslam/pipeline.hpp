#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "waveslam/aoa_estimator.hpp"
#include "waveslam/fusion.hpp"
#include "waveslam/mapping.hpp"
#include "waveslam/profile.hpp"
#include "waveslam/report.hpp"
#include "waveslam/sensor_log.hpp"

namespace waveslam {

struct RunOptions {
  std::uint64_t seed = 1;
  NoiseProfile profile = NoiseProfile::noiseless();
  bool lidar_only = false;
  bool mmwave_only = false;
  int ftm_n = 8;
  int max_order = 2;
  double sifs_s = kDefaultSifs;
  ArrayGeometry array;
  EstimatorConfig estimator;
  GateConfig gates;
  SelectionConfig selection;
  LidarConfig lidar;  // sigma and dropout are taken from the profile
  double resolution_m = 0.05;

  // Throws ConfigError on inconsistent settings.
  void validate() const;
};

// RNG stream ids; every event draws from make_stream(seed, event, id).
enum StreamId : std::uint64_t { kOdometryStream = 1, kLidarStream = 2, kCsiStream = 3, kFtmStream = 4 };

// Timestamp offsets of the records inside one event; keeps log time strictly increasing.
inline constexpr double kRecordSpacing = 1e-6;

// Simulates every sensor along the scenario route and returns the raw log:
// per route point one odom, lidar, csi and ftm record in that order.
std::vector<LogRecord> collect(const Scenario& scenario, const RunOptions& options);

// Ground truth of one event: the dominant traced path at the true pose.
struct EventTruth {
  Pose pose;
  std::optional<RayPath> strongest;
};

EventTruth event_truth(const Scenario& scenario, std::size_t event, const RunOptions& options);

struct ProcessResult {
  std::vector<PointEstimate> points;  // every candidate, in event order
  OccupancyGrid grid;
  MapMetrics metrics;
  std::vector<ErrorSample> samples;  // per-event ranging and AoA errors against truth
  std::size_t events = 0;
};

// Offline half of a run: log -> points -> map, scored against the scenario.
// The log must come from this scenario's route (event i is route point i).
ProcessResult process(const std::vector<LogRecord>& log, const Scenario& scenario, const RunOptions& options);

std::string encode_points_csv(const std::vector<PointEstimate>& points);

}  // namespace waveslam
