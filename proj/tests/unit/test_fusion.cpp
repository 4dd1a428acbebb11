#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "waveslam/fusion.hpp"
#include "waveslam/raytrace.hpp"

using namespace waveslam;

namespace {

// Independent oracle: bisect along the bearing for the point where the
// two-leg length reaches d_hat. The length is monotone in r for r >= 0.
std::optional<Vec2> bisect_reflection(const Vec2& responder, const Vec2& initiator, double bearing, double d_hat) {
  const Vec2 u = unit_vector(bearing);
  auto legs = [&](double r) {
    const Vec2 p = responder + r * u;
    return (p - responder).norm() + (p - initiator).norm();
  };
  if (legs(0.0) >= d_hat) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  while (legs(hi) < d_hat) {
    hi *= 2.0;
    if (hi > 1e9) return std::nullopt;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (legs(mid) < d_hat ? lo : hi) = mid;
  }
  return responder + 0.5 * (lo + hi) * u;
}

PathEstimate aoa(double az_deg, double el_deg = 0.0) { return {{1.0, 0.0}, deg2rad(el_deg), deg2rad(az_deg), 0.0}; }

LidarScan scan_with(std::vector<std::pair<double, std::optional<double>>> beams) {
  LidarScan s;
  for (auto& [bearing_deg, range] : beams) s.beams.push_back({deg2rad(bearing_deg), range});
  return s;
}

PointEstimate radio_at(const Vec2& xy) { return {xy, PointSource::mmwave, 0.0, PointQuality::accepted}; }

}  // namespace

TEST_CASE("reflection point examples") {
  // zero baseline: the point sits at d_hat / 2 along the bearing
  const auto p = reflection_point({1, 1}, {1, 1}, 0.0, 4.0);
  REQUIRE(p);
  CHECK((*p - Vec2(3, 1)).norm() < 1e-12);

  // radios at (+-0.1, 0), wall y = 2: bounce at (0, 2)
  const double d = std::sqrt(16.04);
  const auto q = reflection_point({-0.1, 0}, {0.1, 0}, std::atan2(2.0, 0.1), d);
  REQUIRE(q);
  CHECK((*q - Vec2(0, 2)).norm() < 1e-12);

  CHECK_FALSE(reflection_point({0, 0}, {0.2, 0}, 0.0, 0.2));
  CHECK_FALSE(reflection_point({0, 0}, {0.2, 0}, 0.0, 0.1));
  CHECK_FALSE(reflection_point({0, 0}, {0.2, 0}, 0.0, std::numeric_limits<double>::infinity()));
}

TEST_CASE("reflection point lies on the ellipse and matches bisection") {
  Rng rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 responder(u(rng), u(rng));
    const Vec2 initiator = responder + Vec2(u(rng), u(rng)) * 0.1;
    const double bearing = u(rng);
    const double d_hat = (initiator - responder).norm() + 0.1 + std::abs(u(rng)) * 2.0;
    const auto p = reflection_point(responder, initiator, bearing, d_hat);
    const auto oracle = bisect_reflection(responder, initiator, bearing, d_hat);
    REQUIRE(p.has_value() == oracle.has_value());
    if (!p) continue;
    CHECK(std::abs((*p - responder).norm() + (*p - initiator).norm() - d_hat) < 1e-9);
    CHECK((*p - *oracle).norm() < 1e-9);
  }
}

TEST_CASE("traced order-1 paths invert back to their bounce points") {
  const RobotRig rig;
  const std::vector<WallSegment> walls{{{-10, 2.5}, {10, 2.5}, test_support::brick()}};
  const Pose pose{0.3, -0.2, 0.1};
  const Vec2 initiator = pose.transform(rig.initiator_offset);
  const Vec2 responder = pose.transform(rig.responder_offset);
  const auto paths = trace_paths(initiator, responder, pose.theta + rig.array_boresight, walls);
  REQUIRE_FALSE(paths.empty());
  const RayPath& p = paths[0];
  GateConfig open;
  open.azimuth_max = deg2rad(89.0);
  const PointEstimate est = mmwave_point(pose, rig, RangeEstimate{0.0, p.length()}, aoa(rad2deg(p.azimuth)), open);
  REQUIRE(est.accepted());
  CHECK((est.xy - p.vertices[1]).norm() < 1e-9);
}

TEST_CASE("gates reject with the right quality code") {
  const RobotRig rig;
  const Pose pose{0, 0, 0};
  const GateConfig gates;
  CHECK(mmwave_point(pose, rig, {0.0, 4.0}, aoa(0, 12), gates).quality == PointQuality::rejected_elevation);
  CHECK(mmwave_point(pose, rig, {0.0, 8.1}, aoa(0), gates).quality == PointQuality::rejected_range);
  CHECK(mmwave_point(pose, rig, {0.0, 0.2}, aoa(0), gates).quality == PointQuality::rejected_range);
  CHECK(mmwave_point(pose, rig, {0.0, 4.0}, aoa(45), gates).quality == PointQuality::rejected_range);
  CHECK(mmwave_point(pose, rig, {0.0, 4.0}, aoa(39), gates).accepted());
  // elevation is checked first
  CHECK(mmwave_point(pose, rig, {0.0, 8.1}, aoa(45, 12), gates).quality == PointQuality::rejected_elevation);
  const auto r = mmwave_point(pose, rig, {0.0, 8.1}, aoa(0), gates);
  CHECK_FALSE(r.xy.allFinite());
  CHECK(r.source == PointSource::mmwave);
}

TEST_CASE("gate outcome does not depend on gate order for failing sets") {
  const RobotRig rig;
  GateConfig a, b;
  b.order = {Gate::gain, Gate::azimuth, Gate::range, Gate::elevation};
  Rng rng(4);
  std::uniform_real_distribution<double> az(-60, 60), el(-10, 10), d(0.0, 9.0);
  for (int i = 0; i < 500; ++i) {
    const PathEstimate e = aoa(az(rng), el(rng));
    const RangeEstimate r{0.0, d(rng)};
    CHECK(mmwave_point({0, 0, 0}, rig, r, e, a).accepted() == mmwave_point({0, 0, 0}, rig, r, e, b).accepted());
  }
}

TEST_CASE("d_hat inside the baseline is a geometry rejection") {
  RobotRig rig;
  rig.initiator_offset = {0.2, 0};
  rig.responder_offset = {-0.2, 0};
  GateConfig gates;
  gates.range_min = 0.0;
  CHECK(mmwave_point({0, 0, 0}, rig, {0.0, 0.35}, aoa(0), gates).quality == PointQuality::rejected_geometry);
}

TEST_CASE("selection rule (a): no lidar return in the sector keeps the mmWave point") {
  const LidarScan scan = scan_with({{0.0, std::nullopt}, {90.0, 1.0}});
  const std::vector<PointEstimate> radio{radio_at({2.0, 0.0})};
  const auto out = select_points(scan, radio, SelectionState{}, {0, 0, 0});
  REQUIRE(out.points.size() == 2);
  CHECK(out.points[1].accepted());
  CHECK(out.state.history(0, PointSource::mmwave).size() == 1);
}

TEST_CASE("selection rule (b): agreement keeps both") {
  const LidarScan scan = scan_with({{0.0, 2.0}});
  const std::vector<PointEstimate> radio{radio_at({2.01, 0.0})};
  const auto out = select_points(scan, radio, SelectionState{}, {0, 0, 0});
  REQUIRE(out.points.size() == 2);
  CHECK(out.points[0].accepted());
  CHECK(out.points[1].accepted());
}

TEST_CASE("selection rule (c): disagreement goes to the history median") {
  const LidarScan scan = scan_with({{0.0, 2.0}});
  const std::vector<PointEstimate> radio{radio_at({3.5, 0.0})};

  // empty history: lidar wins
  const auto fresh = select_points(scan, radio, SelectionState{}, {0, 0, 0});
  CHECK(fresh.points[0].accepted());
  CHECK(fresh.points[1].quality == PointQuality::rejected_consistency);

  // history near 3.5: mmWave wins
  SelectionState state;
  for (int i = 0; i < 5; ++i) state.record(0, PointSource::mmwave, 3.5);
  const auto out = select_points(scan, radio, state, {0, 0, 0});
  CHECK(out.points[0].quality == PointQuality::rejected_consistency);
  CHECK(out.points[1].accepted());
}

TEST_CASE("selection output is a relabelling of the input") {
  Rng rng(6);
  std::uniform_real_distribution<double> r(0.5, 4.0), b(0.0, 359.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<double, std::optional<double>>> beams;
    for (int i = 0; i < 36; ++i) beams.push_back({i * 10.0, rng() % 3 ? std::optional<double>(r(rng)) : std::nullopt});
    const LidarScan scan = scan_with(beams);
    std::vector<PointEstimate> radio;
    for (int i = 0; i < 3; ++i) radio.push_back(radio_at(r(rng) * unit_vector(deg2rad(b(rng)))));
    radio.push_back({Vec2(1, 1), PointSource::mmwave, 0.0, PointQuality::rejected_range});
    const auto out = select_points(scan, radio, SelectionState{}, {0, 0, 0});
    std::size_t returns = 0;
    for (const auto& beam : beams) returns += beam.second.has_value();
    REQUIRE(out.points.size() == returns + radio.size());
    for (std::size_t i = 0; i < radio.size(); ++i) {
      const PointEstimate& p = out.points[returns + i];
      CHECK(p.xy == radio[i].xy);
      if (!radio[i].accepted()) CHECK(p.quality == radio[i].quality);
    }
    // history buffers never exceed their depth
    for (int s = 0; s < out.state.sector_count(); ++s) {
      CHECK(out.state.history(s, PointSource::lidar).size() <= 5);
      CHECK(out.state.history(s, PointSource::mmwave).size() <= 5);
    }
  }
}

TEST_CASE("empty inputs pass the state through unchanged") {
  SelectionState state;
  state.record(3, PointSource::lidar, 1.5);
  const auto out = select_points(LidarScan{}, {}, state, {0, 0, 0});
  CHECK(out.points.empty());
  CHECK(out.state.history(3, PointSource::lidar).size() == 1);
  CHECK(out.state.median(3) == doctest::Approx(1.5));
  CHECK_FALSE(out.state.median(4));
}

TEST_CASE("sectors cover the circle") {
  const SelectionState s;
  CHECK(s.sector_count() == 72);
  CHECK(s.sector_of(0.0) == 0);
  CHECK(s.sector_of(deg2rad(4.99)) == 0);
  CHECK(s.sector_of(deg2rad(5.01)) == 1);
  CHECK(s.sector_of(-deg2rad(1.0)) == 71);
}
