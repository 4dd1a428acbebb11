#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "waveslam/mapping.hpp"

using namespace waveslam;

namespace {

OccupancyGrid blank(int nx = 40, int ny = 40, double res = 0.05) {
  OccupancyGrid g;
  g.resolution_m = res;
  g.origin = Vec2::Zero();
  g.cells = Eigen::MatrixXd::Zero(nx, ny);
  return g;
}

PointEstimate point(const Vec2& xy, PointSource s = PointSource::lidar) {
  return {xy, s, 0.0, PointQuality::accepted};
}

// Dense sampling oracle for the cell walk.
std::set<std::pair<int, int>> sampled_cells(const OccupancyGrid& g, const Vec2& a, const Vec2& b) {
  std::set<std::pair<int, int>> out;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    const Vec2 rel = (p - g.origin) / g.resolution_m;
    out.insert({static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y()))});
  }
  return out;
}

}  // namespace

TEST_CASE("a lidar ray frees 19 cells and marks one") {
  OccupancyGrid g = blank();
  integrate_point(g, {0.025, 0.025}, point({1.025, 0.025}));
  int freed = 0, marked = 0;
  for (Eigen::Index i = 0; i < g.cells.size(); ++i) {
    freed += g.cells.data()[i] == kLogOddsFree;
    marked += g.cells.data()[i] == kLogOddsOccupied;
  }
  CHECK(freed == 19);
  CHECK(marked == 1);
  CHECK(g.cells(20, 0) == kLogOddsOccupied);
  CHECK(g.cells(0, 0) == 0.0);
  integrate_point(g, {0.025, 0.025}, point({1.025, 0.025}));
  CHECK(g.cells(20, 0) == doctest::Approx(1.70));
  CHECK(g.lidar_points == 2);
}

TEST_CASE("an mmWave point touches only its cell") {
  OccupancyGrid g = blank();
  integrate_point(g, {0.025, 0.025}, point({1.025, 0.025}, PointSource::mmwave));
  CHECK(g.cells(20, 0) == kLogOddsOccupied);
  CHECK(g.cells.cwiseAbs().sum() == doctest::Approx(kLogOddsOccupied));
  CHECK(g.mmwave_points == 1);
}

TEST_CASE("log-odds clamp at +-10") {
  OccupancyGrid g = blank();
  for (int i = 0; i < 30; ++i) integrate_point(g, {0.025, 0.025}, point({1.025, 0.025}));
  CHECK(g.cells(20, 0) == 10.0);
  CHECK(g.cells(5, 0) == -10.0);
  CHECK(g.cells.maxCoeff() <= 10.0);
  CHECK(g.cells.minCoeff() >= -10.0);
}

TEST_CASE("out-of-grid points are tallied, rejected points refused") {
  OccupancyGrid g = blank();
  integrate_point(g, {0.025, 0.025}, point({5.0, 0.025}));
  CHECK(g.dropped_points == 1);
  CHECK(g.cells.cwiseAbs().sum() == 0.0);
  PointEstimate bad = point({1, 1});
  bad.quality = PointQuality::rejected_range;
  CHECK_THROWS(integrate_point(g, {0.025, 0.025}, bad));
}

TEST_CASE("covering grid snaps to the resolution and includes the margin") {
  Scenario s;
  s.walls = test_support::box(0.013, -0.5, 3.0, 2.0);
  const OccupancyGrid g = OccupancyGrid::covering(s, 0.05, 1.0);
  CHECK(std::abs(std::remainder(g.origin.x(), 0.05)) < 1e-9);
  CHECK(std::abs(std::remainder(g.origin.y(), 0.05)) < 1e-9);
  CHECK(g.origin.x() <= 0.013 - 1.0);
  CHECK(g.origin.x() + g.cells.rows() * 0.05 >= 4.0 - 1e-9);
  CHECK(g.cell_of({0.5, 0.5}).has_value());
  CHECK_FALSE(g.cell_of({100, 0}).has_value());
}

TEST_CASE("integration order does not change the grid away from the clamp") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.1, 1.9);
  std::vector<std::pair<Vec2, PointEstimate>> updates;
  for (int i = 0; i < 200; ++i)
    updates.push_back({{u(rng), u(rng)}, point({u(rng), u(rng)}, i % 3 ? PointSource::lidar : PointSource::mmwave)});
  OccupancyGrid a = blank(), b = blank();
  for (const auto& [r, p] : updates) integrate_point(a, r, p);
  std::shuffle(updates.begin(), updates.end(), rng);
  for (const auto& [r, p] : updates) integrate_point(b, r, p);
  CHECK((a.cells - b.cells).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(a.lidar_points == b.lidar_points);
}

TEST_CASE("cell walk agrees with dense sampling") {
  const OccupancyGrid g = blank(100, 100);
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.01, 4.99);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const auto walked = traverse_cells(g, a, b);
    std::set<std::pair<int, int>> cells;
    for (std::size_t i = 0; i < walked.size(); ++i) {
      cells.insert({walked[i].x(), walked[i].y()});
      if (i > 0) CHECK((walked[i] - walked[i - 1]).cwiseAbs().sum() == 1);
    }
    CHECK(cells.size() == walked.size());
    const auto sampled = sampled_cells(g, a, b);
    // sampling can miss a corner-clipped cell but never invents one
    for (const auto& c : sampled) CHECK(cells.count(c) == 1);
    CHECK(walked.size() <= sampled.size() + 4);
    CHECK(walked.front() == CellIndex(static_cast<int>(a.x() / 0.05), static_cast<int>(a.y() / 0.05)));
    CHECK(walked.back() == CellIndex(static_cast<int>(b.x() / 0.05), static_cast<int>(b.y() / 0.05)));
  }
}

TEST_CASE("scoring: perfect map and empty map") {
  Scenario s;
  s.materials = {test_support::brick(), test_support::glass()};
  s.walls = test_support::box(0.025, 0.025, 2.025, 2.025);
  s.walls.push_back({{0.525, 1.025}, {1.525, 1.025}, test_support::glass()});
  OccupancyGrid g = OccupancyGrid::covering(s);
  const MapMetrics empty = score_map(g, s);
  CHECK(empty.iou == 0.0);
  CHECK(empty.glass_coverage == 0.0);

  const auto truth = rasterize_walls(g, s.walls);
  for (Eigen::Index i = 0; i < truth.rows(); ++i)
    for (Eigen::Index j = 0; j < truth.cols(); ++j)
      if (truth(i, j)) g.cells(i, j) = 1.0;
  const MapMetrics perfect = score_map(g, s);
  CHECK(perfect.iou == 1.0);
  CHECK(perfect.glass_coverage == 1.0);

  Scenario no_walls;
  CHECK_THROWS(score_map(OccupancyGrid::covering(s), no_walls));
}

TEST_CASE("PGM and YAML encodings") {
  OccupancyGrid g = blank(4, 3);
  g.cells(0, 2) = 2.0;   // top-left pixel
  g.cells(3, 0) = -1.0;  // bottom-right pixel
  const std::string pgm = encode_pgm(g);
  const std::string header = "P5\n4 3\n255\n";
  REQUIRE(pgm.size() == header.size() + 12);
  CHECK(pgm.rfind(header, 0) == 0);
  CHECK(static_cast<unsigned char>(pgm[header.size()]) == 0);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 11]) == 255);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 1]) == 127);
  const std::string yaml = encode_map_yaml(g, "map.pgm");
  CHECK(yaml.find("image: map.pgm") != std::string::npos);
  CHECK(yaml.find("resolution: 0.05") != std::string::npos);
  CHECK(encode_metrics_csv({0.5, 0.25, 3, 4}) == "iou,glass_coverage,lidar_points,mmwave_points\n0.5,0.25,3,4\n");
}
