#include "waveslam/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace waveslam {

std::string_view to_string(PointSource source) {
  return source == PointSource::lidar ? "lidar" : "mmwave";
}

std::string_view to_string(PointQuality quality) {
  switch (quality) {
    case PointQuality::accepted: return "accepted";
    case PointQuality::rejected_elevation: return "rejected_elevation";
    case PointQuality::rejected_range: return "rejected_range";
    case PointQuality::rejected_geometry: return "rejected_geometry";
    case PointQuality::rejected_consistency: return "rejected_consistency";
  }
  return "unknown";
}

std::optional<Vec2> reflection_point(const Vec2& responder_xy, const Vec2& initiator_xy,
                                     double world_bearing, double d_hat) {
  const Vec2 baseline = initiator_xy - responder_xy;
  const Vec2 u = unit_vector(world_bearing);
  if (!std::isfinite(d_hat) || !(d_hat > baseline.norm())) return std::nullopt;
  const double denom = d_hat - u.dot(baseline);
  if (!(denom > 0.0)) return std::nullopt;
  const double r = (d_hat * d_hat - baseline.squaredNorm()) / (2.0 * denom);
  return responder_xy + r * u;
}

PointEstimate mmwave_point(const Pose& odom_pose, const RobotRig& rig, const RangeEstimate& range,
                           const PathEstimate& aoa, const GateConfig& gates, double event_time) {
  PointEstimate out;
  out.source = PointSource::mmwave;
  out.event_time = event_time;
  out.xy = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());

  auto passes = [&](Gate gate) {
    switch (gate) {
      case Gate::elevation: return std::abs(aoa.elevation) <= gates.elevation_max;
      case Gate::range: return range.distance_m >= gates.range_min && range.distance_m <= gates.range_max;
      case Gate::azimuth: return std::abs(aoa.azimuth) <= gates.azimuth_max;
      case Gate::gain:
        return !gates.min_gain_db || 20.0 * std::log10(std::abs(aoa.gain)) >= *gates.min_gain_db;
    }
    return false;
  };
  for (Gate gate : gates.order) {
    if (passes(gate)) continue;
    out.quality = gate == Gate::elevation ? PointQuality::rejected_elevation : PointQuality::rejected_range;
    return out;
  }

  const Vec2 responder = odom_pose.transform(rig.responder_offset);
  const Vec2 initiator = odom_pose.transform(rig.initiator_offset);
  const double bearing = odom_pose.theta + rig.array_boresight + aoa.azimuth;
  const auto p = reflection_point(responder, initiator, bearing, range.distance_m);
  if (!p || !p->allFinite()) {
    out.quality = PointQuality::rejected_geometry;
    return out;
  }
  out.xy = *p;
  out.quality = PointQuality::accepted;
  return out;
}

SelectionState::SelectionState(SelectionConfig config)
    : config_(config),
      sector_count_(static_cast<int>(std::ceil(2.0 * std::numbers::pi / config.sector_width - 1e-9))) {
  if (!(config.sector_width > 0.0) || config.depth < 1)
    throw std::invalid_argument("SelectionState: invalid sector width or depth");
}

int SelectionState::sector_of(double robot_bearing) const {
  double b = std::fmod(robot_bearing, 2.0 * std::numbers::pi);
  if (b < 0.0) b += 2.0 * std::numbers::pi;
  const int s = static_cast<int>(std::floor(b / config_.sector_width));
  return std::clamp(s, 0, sector_count_ - 1);
}

void SelectionState::record(int sector, PointSource source, double range) {
  auto& buf = buffers_[{sector, source}];
  buf.push_back(range);
  while (buf.size() > config_.depth) buf.pop_front();
}

const std::deque<double>& SelectionState::history(int sector, PointSource source) const {
  static const std::deque<double> empty;
  auto it = buffers_.find({sector, source});
  return it == buffers_.end() ? empty : it->second;
}

std::optional<double> SelectionState::median(int sector) const {
  std::vector<double> values;
  for (PointSource src : {PointSource::lidar, PointSource::mmwave}) {
    const auto& h = history(sector, src);
    values.insert(values.end(), h.begin(), h.end());
  }
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PointEstimate> lidar_points(const LidarScan& scan, const Pose& odom_pose, double event_time) {
  const Vec2 origin = odom_pose.transform(scan.sensor_offset);
  std::vector<PointEstimate> out;
  for (const LidarBeam& beam : scan.beams) {
    if (!beam.range) continue;
    out.push_back({origin + *beam.range * unit_vector(odom_pose.theta + beam.bearing), PointSource::lidar,
                   event_time, PointQuality::accepted});
  }
  return out;
}

SelectionOutput select_points(const LidarScan& scan, std::span<const PointEstimate> mmwave_points,
                              SelectionState state, const Pose& odom_pose, double event_time) {
  const Vec2 origin = odom_pose.transform(scan.sensor_offset);

  struct Observed {
    std::size_t index;  // into output
    int sector;
    double bearing;
    double range;
  };
  SelectionOutput result{{}, state};
  std::vector<Observed> lidar;
  for (const LidarBeam& beam : scan.beams) {
    if (!beam.range) continue;
    lidar.push_back({result.points.size(), state.sector_of(beam.bearing), beam.bearing, *beam.range});
    result.points.push_back({origin + *beam.range * unit_vector(odom_pose.theta + beam.bearing),
                             PointSource::lidar, event_time, PointQuality::accepted});
  }

  std::vector<Observed> radio;
  for (const PointEstimate& p : mmwave_points) {
    const std::size_t index = result.points.size();
    result.points.push_back(p);
    if (!p.accepted() || p.source != PointSource::mmwave) continue;
    const Vec2 rel = p.xy - origin;
    double bearing = std::fmod(std::atan2(rel.y(), rel.x()) - odom_pose.theta, 2.0 * std::numbers::pi);
    if (bearing < 0.0) bearing += 2.0 * std::numbers::pi;
    radio.push_back({index, state.sector_of(bearing), bearing, rel.norm()});
  }

  const double threshold = state.config().disagreement_threshold_m;
  auto angular_gap = [](double a, double b) { return std::abs(wrap_angle(a - b)); };
  for (const Observed& m : radio) {
    std::vector<const Observed*> hits;
    for (const Observed& l : lidar)
      if (l.sector == m.sector) hits.push_back(&l);
    if (hits.empty()) continue;  // rule (a): LiDAR sees nothing here

    const Observed* nearest = *std::min_element(hits.begin(), hits.end(), [&](auto* a, auto* b) {
      return angular_gap(a->bearing, m.bearing) < angular_gap(b->bearing, m.bearing);
    });
    if (std::abs(nearest->range - m.range) <= threshold) continue;  // rule (b)

    const auto median = state.median(m.sector);
    const bool lidar_wins =
        !median || std::abs(nearest->range - *median) <= std::abs(m.range - *median);
    if (lidar_wins) {
      result.points[m.index].quality = PointQuality::rejected_consistency;
    } else {
      for (const Observed* l : hits)
        if (std::abs(l->range - m.range) > threshold)
          result.points[l->index].quality = PointQuality::rejected_consistency;
    }
  }

  for (const Observed& l : lidar)
    if (result.points[l.index].accepted()) result.state.record(l.sector, PointSource::lidar, l.range);
  for (const Observed& m : radio)
    if (result.points[m.index].accepted()) result.state.record(m.sector, PointSource::mmwave, m.range);
  return result;
}

}  // namespace waveslam
