#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "waveslam/environment.hpp"
#include "waveslam/fusion.hpp"

namespace waveslam {

inline constexpr double kLogOddsOccupied = 0.85;
inline constexpr double kLogOddsFree = -0.4;
inline constexpr double kLogOddsClamp = 10.0;

using CellIndex = Eigen::Vector2i;

// Log-odds occupancy grid. cells(ix, iy) covers
// [origin + (ix, iy)·res, origin + (ix+1, iy+1)·res).
struct OccupancyGrid {
  double resolution_m = 0.05;
  Vec2 origin = Vec2::Zero();
  Eigen::MatrixXd cells;
  double clamp = kLogOddsClamp;
  std::size_t dropped_points = 0;
  std::size_t lidar_points = 0;
  std::size_t mmwave_points = 0;

  // Grid over the scenario bounding box plus margin, with the origin snapped
  // to a multiple of the resolution.
  static OccupancyGrid covering(const Scenario& scenario, double resolution_m = 0.05, double margin_m = 1.0);

  std::optional<CellIndex> cell_of(const Vec2& p) const;
  Vec2 centre_of(const CellIndex& c) const;
  bool contains(const CellIndex& c) const {
    return c.x() >= 0 && c.y() >= 0 && c.x() < cells.rows() && c.y() < cells.cols();
  }
};

// Adds one accepted point: the endpoint cell gains l_occ; for LiDAR points
// the cells strictly between robot and endpoint gain l_free. mmWave points
// touch only the endpoint. Out-of-grid points are counted and dropped.
void integrate_point(OccupancyGrid& grid, const Vec2& robot_xy, const PointEstimate& point);

// Cells crossed by the segment from `from` to `to`, in traversal order,
// including both end cells (Amanatides–Woo walk).
std::vector<CellIndex> traverse_cells(const OccupancyGrid& grid, const Vec2& from, const Vec2& to);

// Boolean mask of cells touched by walls passing `filter` (all when empty).
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> rasterize_walls(const OccupancyGrid& grid,
                                                                    std::span<const WallSegment> walls,
                                                                    const MaterialFilter& filter = {});

struct MapMetrics {
  double iou = 0.0;
  double glass_coverage = 0.0;  // 0 when the scenario has no LiDAR-transparent walls
  std::size_t lidar_points = 0;
  std::size_t mmwave_points = 0;
};

MapMetrics score_map(const OccupancyGrid& grid, const Scenario& scenario, double occ_threshold = 0.0);

// Binary P5 image: 0 occupied, 255 free, 127 unknown; first row is max y.
std::string encode_pgm(const OccupancyGrid& grid, double occ_threshold = 0.0);
// map_server-style YAML sidecar.
std::string encode_map_yaml(const OccupancyGrid& grid, const std::string& image_name, double occ_threshold = 0.0);
std::string encode_metrics_csv(const MapMetrics& metrics);

}  // namespace waveslam
