#include "waveslam/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace waveslam {

OccupancyGrid OccupancyGrid::covering(const Scenario& scenario, double resolution_m, double margin_m) {
  if (!(resolution_m > 0.0)) throw std::invalid_argument("OccupancyGrid: resolution must be positive");
  const auto [lo, hi] = scenario.bounding_box();
  OccupancyGrid grid;
  grid.resolution_m = resolution_m;
  const Vec2 start = ((lo.array() - margin_m) / resolution_m).floor() * resolution_m;
  const Vec2 stop = ((hi.array() + margin_m) / resolution_m).ceil() * resolution_m;
  grid.origin = start;
  const Eigen::Index nx = std::max<Eigen::Index>(1, std::lround((stop.x() - start.x()) / resolution_m));
  const Eigen::Index ny = std::max<Eigen::Index>(1, std::lround((stop.y() - start.y()) / resolution_m));
  grid.cells = Eigen::MatrixXd::Zero(nx, ny);
  return grid;
}

std::optional<CellIndex> OccupancyGrid::cell_of(const Vec2& p) const {
  if (!p.allFinite()) return std::nullopt;
  const Vec2 rel = (p - origin) / resolution_m;
  const CellIndex c(static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())));
  if (!contains(c)) return std::nullopt;
  return c;
}

Vec2 OccupancyGrid::centre_of(const CellIndex& c) const {
  return origin + (c.cast<double>().array() + 0.5).matrix() * resolution_m;
}

std::vector<CellIndex> traverse_cells(const OccupancyGrid& grid, const Vec2& from, const Vec2& to) {
  const Vec2 a = (from - grid.origin) / grid.resolution_m;
  const Vec2 b = (to - grid.origin) / grid.resolution_m;
  CellIndex cell(static_cast<int>(std::floor(a.x())), static_cast<int>(std::floor(a.y())));
  const CellIndex last(static_cast<int>(std::floor(b.x())), static_cast<int>(std::floor(b.y())));
  const Vec2 d = b - a;
  const CellIndex step(d.x() > 0 ? 1 : -1, d.y() > 0 ? 1 : -1);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Vec2 t_max, t_delta;
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      t_max[axis] = kInf;
      t_delta[axis] = kInf;
      continue;
    }
    const double boundary = step[axis] > 0 ? std::floor(a[axis]) + 1.0 : std::floor(a[axis]);
    t_max[axis] = (boundary - a[axis]) / d[axis];
    t_delta[axis] = std::abs(1.0 / d[axis]);
  }

  std::vector<CellIndex> out{cell};
  int remaining_x = std::abs(last.x() - cell.x());
  int remaining_y = std::abs(last.y() - cell.y());
  while (remaining_x + remaining_y > 0) {
    const bool move_x = remaining_y == 0 || (remaining_x > 0 && t_max.x() < t_max.y());
    if (move_x) {
      cell.x() += step.x();
      t_max.x() += t_delta.x();
      --remaining_x;
    } else {
      cell.y() += step.y();
      t_max.y() += t_delta.y();
      --remaining_y;
    }
    out.push_back(cell);
  }
  return out;
}

void integrate_point(OccupancyGrid& grid, const Vec2& robot_xy, const PointEstimate& point) {
  if (!point.accepted()) throw std::invalid_argument("integrate_point: point not accepted");
  const auto end = grid.cell_of(point.xy);
  if (!end || !grid.cell_of(robot_xy)) {
    ++grid.dropped_points;
    return;
  }
  auto bump = [&](const CellIndex& c, double delta) {
    double& v = grid.cells(c.x(), c.y());
    v = std::clamp(v + delta, -grid.clamp, grid.clamp);
  };
  if (point.source == PointSource::lidar) {
    ++grid.lidar_points;
    const auto cells = traverse_cells(grid, robot_xy, point.xy);
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) bump(cells[i], kLogOddsFree);
  } else {
    ++grid.mmwave_points;
  }
  bump(*end, kLogOddsOccupied);
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> rasterize_walls(const OccupancyGrid& grid,
                                                                    std::span<const WallSegment> walls,
                                                                    const MaterialFilter& filter) {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(grid.cells.rows(), grid.cells.cols(), false);
  for (const WallSegment& w : walls) {
    if (filter && !filter(w.material)) continue;
    const int samples = static_cast<int>(std::ceil(w.length() / (grid.resolution_m / 8.0))) + 1;
    for (int i = 0; i <= samples; ++i) {
      const Vec2 p = w.a + (w.b - w.a) * (static_cast<double>(i) / samples);
      if (auto c = grid.cell_of(p)) mask(c->x(), c->y()) = true;
    }
  }
  return mask;
}

MapMetrics score_map(const OccupancyGrid& grid, const Scenario& scenario, double occ_threshold) {
  const auto truth = rasterize_walls(grid, scenario.walls);
  if (truth.count() == 0) throw std::invalid_argument("score_map: scenario has no wall cells");
  const auto occupied = (grid.cells.array() > occ_threshold).eval();
  const auto glass = rasterize_walls(grid, scenario.walls, [](const Material& m) { return !m.lidar_opaque; });

  MapMetrics m;
  const auto inter = (occupied && truth.array()).count();
  const auto uni = (occupied || truth.array()).count();
  m.iou = static_cast<double>(inter) / static_cast<double>(uni);
  const auto glass_cells = glass.count();
  if (glass_cells > 0)
    m.glass_coverage = static_cast<double>((occupied && glass.array()).count()) / static_cast<double>(glass_cells);
  m.lidar_points = grid.lidar_points;
  m.mmwave_points = grid.mmwave_points;
  return m;
}

std::string encode_pgm(const OccupancyGrid& grid, double occ_threshold) {
  const auto width = grid.cells.rows();
  const auto height = grid.cells.cols();
  std::string out = fmt::format("P5\n{} {}\n255\n", width, height);
  out.reserve(out.size() + static_cast<std::size_t>(width * height));
  for (Eigen::Index row = 0; row < height; ++row) {
    const Eigen::Index iy = height - 1 - row;
    for (Eigen::Index ix = 0; ix < width; ++ix) {
      const double v = grid.cells(ix, iy);
      const unsigned char px = v > occ_threshold ? 0 : (v < 0.0 ? 255 : 127);
      out.push_back(static_cast<char>(px));
    }
  }
  return out;
}

std::string encode_map_yaml(const OccupancyGrid& grid, const std::string& image_name, double occ_threshold) {
  return fmt::format(
      "image: {}\nresolution: {}\norigin: [{}, {}, 0.0]\nwidth: {}\nheight: {}\n"
      "occupied_log_odds_threshold: {}\nnegate: 0\n",
      image_name, grid.resolution_m, grid.origin.x(), grid.origin.y(), grid.cells.rows(), grid.cells.cols(),
      occ_threshold);
}

std::string encode_metrics_csv(const MapMetrics& m) {
  return fmt::format("iou,glass_coverage,lidar_points,mmwave_points\n{},{},{},{}\n", m.iou, m.glass_coverage,
                     m.lidar_points, m.mmwave_points);
}

}  // namespace waveslam
