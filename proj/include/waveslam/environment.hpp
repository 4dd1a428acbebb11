#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "waveslam/geometry.hpp"

namespace waveslam {

// Raised for malformed or inconsistent scenario input. The message carries
// the source name plus the line or field path that failed.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Material {
  std::string name;
  double reflection_loss_db = 0.0;  // per bounce, in [0, 60]
  bool lidar_opaque = true;

  bool operator==(const Material&) const = default;
};

// Brick 7 dB, glass 6 dB (transparent to LiDAR), metal 5 dB, absorber 60 dB.
std::vector<Material> default_materials();

struct WallSegment {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  Material material;

  double length() const { return (b - a).norm(); }
  bool operator==(const WallSegment&) const = default;
};

// Mounting geometry of the LiDAR and the two radios, in the robot frame.
struct RobotRig {
  Vec2 lidar_offset = Vec2::Zero();
  Vec2 initiator_offset{0.0, -0.1};
  Vec2 responder_offset{0.0, 0.1};
  double array_boresight = 0.0;  // radians, shared by both radios
  bool direct_path_blocked = true;

  bool operator==(const RobotRig&) const = default;
};

struct TimedPose {
  double t = 0.0;
  Pose pose;

  bool operator==(const TimedPose&) const = default;
};

struct Scenario {
  std::vector<WallSegment> walls;
  std::vector<Material> materials;
  RobotRig rig;
  std::vector<TimedPose> route;
  std::uint64_t rng_seed = 0;

  // Throws ScenarioError if any invariant is broken.
  void validate() const;

  // Axis-aligned bounds of walls and route positions as (min, max).
  std::pair<Vec2, Vec2> bounding_box() const;

  bool operator==(const Scenario&) const = default;
};

inline constexpr int kScenarioSchemaVersion = 1;

Scenario parse_scenario(const std::string& text, const std::string& source_name = "<string>");
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Degree value whose conversion back to radians reproduces `radians` exactly,
// so angle fields survive a save/load cycle bit-for-bit.
double degrees_for_exact_roundtrip(double radians);

struct RayHit {
  Vec2 point;
  double distance = 0.0;
  std::size_t wall = 0;
};

using MaterialFilter = std::function<bool(const Material&)>;

// Nearest wall hit along the ray, among walls whose material passes `filter`
// (all walls when the filter is empty). Equal distances resolve to the lower
// wall index.
std::optional<RayHit> raycast(const Vec2& origin, const Vec2& direction,
                              std::span<const WallSegment> walls,
                              const MaterialFilter& filter = {});

// Intersection parameters of segment p→q with wall segment a→b. Returns
// (t along p→q, s along a→b) when the lines are not parallel.
std::optional<std::pair<double, double>> segment_intersection(const Vec2& p, const Vec2& q,
                                                              const Vec2& a, const Vec2& b);

// Straight-line random walk inside the scenario: each step moves `step_length`
// along the heading, turning by a uniform draw in ±max_turn and bouncing off
// walls closer than `clearance`.
std::vector<TimedPose> random_walk_route(std::span<const WallSegment> walls, const Pose& start,
                                         int steps, double step_length, double dt,
                                         double max_turn, double clearance, std::uint64_t seed);

}  // namespace waveslam
