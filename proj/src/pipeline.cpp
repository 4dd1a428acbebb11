#include "waveslam/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "waveslam/ftm.hpp"
#include "waveslam/raytrace.hpp"

namespace waveslam {

void RunOptions::validate() const {
  if (lidar_only && mmwave_only) throw ConfigError("--lidar-only and --mmwave-only are mutually exclusive");
  if (ftm_n < 1 || ftm_n > kMaxBurstMeasurements)
    throw ConfigError(fmt::format("ftm n must be in [1, {}], got {}", kMaxBurstMeasurements, ftm_n));
  if (max_order < 1 || max_order > 3) throw ConfigError(fmt::format("max order must be in [1, 3], got {}", max_order));
  if (!(resolution_m > 0.0)) throw ConfigError("map resolution must be positive");
  try {
    array.validate();
    estimator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

TraceOptions trace_options(const Scenario& scenario, const RunOptions& options) {
  TraceOptions t;
  t.max_order = options.max_order;
  t.include_direct = !scenario.rig.direct_path_blocked;
  t.carrier_hz = options.array.carrier_hz;
  return t;
}

std::vector<RayPath> trace_at(const Scenario& scenario, const Pose& pose, const RunOptions& options) {
  return trace_paths(pose.transform(scenario.rig.initiator_offset), pose.transform(scenario.rig.responder_offset),
                     pose.theta + scenario.rig.array_boresight, scenario.walls, trace_options(scenario, options));
}

}  // namespace

EventTruth event_truth(const Scenario& scenario, std::size_t event, const RunOptions& options) {
  if (event >= scenario.route.size()) throw std::out_of_range("event_truth: event beyond route");
  EventTruth truth{scenario.route[event].pose, std::nullopt};
  const auto paths = trace_at(scenario, truth.pose, options);
  if (const RayPath* p = dominant_path(paths)) truth.strongest = *p;
  return truth;
}

std::vector<LogRecord> collect(const Scenario& scenario, const RunOptions& options) {
  options.validate();
  scenario.validate();
  const NoiseProfile& profile = options.profile;

  Rng odo_rng = make_stream(options.seed, 0, kOdometryStream);
  const OdometryTrack odometry = simulate_odometry(scenario.route, profile.odometry, odo_rng);

  LidarConfig lidar = options.lidar;
  lidar.sigma = profile.lidar_sigma;
  lidar.dropout_probability = profile.lidar_dropout;

  std::vector<LogRecord> log;
  log.reserve(scenario.route.size() * 4);
  for (std::size_t i = 0; i < scenario.route.size(); ++i) {
    const double t = scenario.route[i].t;
    const Pose& truth = scenario.route[i].pose;
    log.emplace_back(OdomRecord{t, odometry.poses[i].pose});

    Rng lidar_rng = make_stream(options.seed, i, kLidarStream);
    const LidarScan scan = simulate_lidar(truth, scenario, lidar, lidar_rng);
    LidarRecord lr{t + kRecordSpacing, lidar.angular_step, lidar.max_range, {}};
    for (const LidarBeam& b : scan.beams) lr.ranges.push_back(b.range);
    log.emplace_back(std::move(lr));

    const auto paths = trace_at(scenario, truth, options);
    Rng csi_rng = make_stream(options.seed, i, kCsiStream);
    CsiSnapshot csi =
        synthesize_csi(paths, options.array, profile.csi_noise_sigma, profile.elevation_jitter_sigma, csi_rng);
    log.emplace_back(CsiRecord{t + 2 * kRecordSpacing, std::move(csi.h)});

    FtmRecord fr{t + 3 * kRecordSpacing, {}};
    if (const RayPath* dominant = dominant_path(paths)) {
      Rng ftm_rng = make_stream(options.seed, i, kFtmStream);
      const ClockModel clock = clock_for_path(profile, dominant->gain);
      fr.measurements = simulate_burst(dominant->delay, options.ftm_n, clock, options.sifs_s, ftm_rng).measurements;
    }
    log.emplace_back(std::move(fr));
  }
  return log;
}

namespace {

struct Event {
  const OdomRecord* odom = nullptr;
  const LidarRecord* lidar = nullptr;
  const CsiRecord* csi = nullptr;
  const FtmRecord* ftm = nullptr;
};

std::vector<Event> group_events(const std::vector<LogRecord>& log) {
  std::vector<Event> events;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const LogRecord& r = log[i];
    if (const auto* o = std::get_if<OdomRecord>(&r)) {
      events.push_back({o});
      continue;
    }
    if (events.empty()) throw LogError(fmt::format("record {}: sensor record before the first odom record", i + 1));
    Event& e = events.back();
    auto place = [&](auto*& slot, const auto* value) {
      if (slot) throw LogError(fmt::format("record {}: duplicate record type within one event", i + 1));
      slot = value;
    };
    if (const auto* l = std::get_if<LidarRecord>(&r)) place(e.lidar, l);
    else if (const auto* c = std::get_if<CsiRecord>(&r)) place(e.csi, c);
    else if (const auto* f = std::get_if<FtmRecord>(&r)) place(e.ftm, f);
  }
  return events;
}

LidarScan scan_from_record(const LidarRecord& record, const Pose& odom, const Scenario& scenario) {
  LidarScan scan;
  scan.pose_truth = odom;
  scan.sensor_offset = scenario.rig.lidar_offset;
  scan.max_range = record.max_range;
  for (std::size_t i = 0; i < record.ranges.size(); ++i)
    scan.beams.push_back({static_cast<double>(i) * record.angular_step, record.ranges[i]});
  return scan;
}

}  // namespace

ProcessResult process(const std::vector<LogRecord>& log, const Scenario& scenario, const RunOptions& options) {
  options.validate();
  scenario.validate();
  const auto events = group_events(log);
  if (events.size() > scenario.route.size())
    throw LogError(fmt::format("log has {} events but the scenario route has {} points", events.size(),
                               scenario.route.size()));

  ProcessResult result;
  result.grid = OccupancyGrid::covering(scenario, options.resolution_m);
  result.events = events.size();
  SelectionState state(options.selection);

  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    const Pose odom = e.odom->pose;
    const double t = e.odom->t;

    std::vector<PointEstimate> radio;
    std::optional<RangeEstimate> range;
    std::optional<PathEstimate> aoa;
    if (e.ftm && !e.ftm->measurements.empty()) {
      FtmBurst burst;
      burst.measurements = e.ftm->measurements;
      range = RangeEstimate::from_tof(estimate_tof(burst));
    }
    if (e.csi) {
      ArrayGeometry geometry = options.array;
      geometry.k_elems = static_cast<int>(e.csi->h.rows());
      geometry.j_elems = static_cast<int>(e.csi->h.cols());
      CsiSnapshot snapshot{e.csi->h, 0.0, geometry, 0};
      const auto estimates = extract_paths(snapshot, options.estimator);
      if (!estimates.empty()) aoa = strongest_path(estimates);
    }
    if (!options.lidar_only && range && aoa)
      radio.push_back(mmwave_point(odom, scenario.rig, *range, *aoa, options.gates, t));

    LidarScan scan;
    if (e.lidar && !options.mmwave_only) scan = scan_from_record(*e.lidar, odom, scenario);
    else scan.sensor_offset = scenario.rig.lidar_offset;

    SelectionOutput selected = select_points(scan, radio, std::move(state), odom, t);
    state = std::move(selected.state);
    const Vec2 lidar_origin = odom.transform(scenario.rig.lidar_offset);
    for (const PointEstimate& p : selected.points) {
      if (p.accepted()) integrate_point(result.grid, p.source == PointSource::lidar ? lidar_origin : odom.position(), p);
      result.points.push_back(p);
    }

    const EventTruth truth = event_truth(scenario, i, options);
    if (truth.strongest) {
      if (range)
        result.samples.push_back(
            {"distance_error_m", "all", std::abs(range->distance_m - truth.strongest->length()) / 2.0});
      if (aoa)
        result.samples.push_back(
            {"azimuth_error_deg", "all", rad2deg(std::abs(wrap_angle(aoa->azimuth - truth.strongest->azimuth)))});
    }
  }
  result.metrics = score_map(result.grid, scenario);
  return result;
}

std::string encode_points_csv(const std::vector<PointEstimate>& points) {
  std::string out = "t,source,x,y,quality\n";
  for (const PointEstimate& p : points)
    out += fmt::format("{},{},{},{},{}\n", p.event_time, to_string(p.source), p.xy.x(), p.xy.y(), to_string(p.quality));
  return out;
}

}  // namespace waveslam
