#include "waveslam/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace waveslam {

using Json = nlohmann::ordered_json;

std::vector<Material> default_materials() {
  return {
      {"brick", 7.0, true},
      {"glass", 6.0, false},
      {"metal", 5.0, true},
      {"absorber", 60.0, true},
  };
}

void Scenario::validate() const {
  std::set<std::string> names;
  for (std::size_t i = 0; i < materials.size(); ++i) {
    const Material& m = materials[i];
    if (m.name.empty()) throw ScenarioError(fmt::format("materials[{}]: empty name", i));
    if (!names.insert(m.name).second)
      throw ScenarioError(fmt::format("materials[{}]: duplicate material '{}'", i, m.name));
    if (!(m.reflection_loss_db >= 0.0 && m.reflection_loss_db <= 60.0))
      throw ScenarioError(fmt::format("materials[{}].reflection_loss_db: {} outside [0, 60]", i,
                                      m.reflection_loss_db));
  }
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const WallSegment& w = walls[i];
    auto declared = std::find(materials.begin(), materials.end(), w.material);
    if (declared == materials.end())
      throw ScenarioError(
          fmt::format("walls[{}].material: undeclared material '{}'", i, w.material.name));
    if (!(w.length() > 0.0)) throw ScenarioError(fmt::format("walls[{}]: zero-length segment", i));
  }
  if (rig.initiator_offset == rig.responder_offset)
    throw ScenarioError("rig: initiator_offset equals responder_offset");
  for (std::size_t i = 1; i < route.size(); ++i) {
    if (!(route[i].t > route[i - 1].t))
      throw ScenarioError(fmt::format("route[{}].t: {} not after previous time {}", i, route[i].t,
                                      route[i - 1].t));
  }
}

std::pair<Vec2, Vec2> Scenario::bounding_box() const {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  auto grow = [&](const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (const WallSegment& w : walls) {
    grow(w.a);
    grow(w.b);
  }
  for (const TimedPose& tp : route) grow(tp.pose.position());
  if (walls.empty() && route.empty()) return {Vec2::Zero(), Vec2::Zero()};
  return {lo, hi};
}

double degrees_for_exact_roundtrip(double radians) {
  const double guess = rad2deg(radians);
  if (deg2rad(guess) == radians) return guess;
  double up = guess;
  double down = guess;
  for (int i = 0; i < 16; ++i) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (deg2rad(up) == radians) return up;
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (deg2rad(down) == radians) return down;
  }
  return guess;
}

namespace {

int line_of_offset(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ScenarioError(fmt::format("{}: field '{}': {}", source_, field, what));
  }

  const Json& require(const Json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
  }

  double number(const Json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "not finite");
    return v;
  }

  Vec2 point(const Json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  }

  bool boolean(const Json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected true/false");
    return j.get<bool>();
  }

  std::string text(const Json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

Json point_json(const Vec2& p) { return Json::array({p.x(), p.y()}); }

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(fmt::format("{}:{}: parse error: {}", source_name,
                                    line_of_offset(text, e.byte), e.what()));
  }
  Reader rd(source_name);
  if (!doc.is_object()) rd.fail("<root>", "expected an object");

  const Json& version = rd.require(doc, "waveslam_scenario", "");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion)
    rd.fail("waveslam_scenario", fmt::format("unsupported version (expected {})", kScenarioSchemaVersion));

  Scenario sc;
  const Json& materials = rd.require(doc, "materials", "");
  if (!materials.is_array()) rd.fail("materials", "expected an array");
  for (std::size_t i = 0; i < materials.size(); ++i) {
    const std::string path = fmt::format("materials[{}]", i);
    Material m;
    m.name = rd.text(rd.require(materials[i], "name", path), path + ".name");
    m.reflection_loss_db =
        rd.number(rd.require(materials[i], "reflection_loss_db", path), path + ".reflection_loss_db");
    m.lidar_opaque = rd.boolean(rd.require(materials[i], "lidar_opaque", path), path + ".lidar_opaque");
    sc.materials.push_back(std::move(m));
  }

  const Json& walls = rd.require(doc, "walls", "");
  if (!walls.is_array()) rd.fail("walls", "expected an array");
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const std::string path = fmt::format("walls[{}]", i);
    WallSegment w;
    w.a = rd.point(rd.require(walls[i], "a", path), path + ".a");
    w.b = rd.point(rd.require(walls[i], "b", path), path + ".b");
    const std::string name = rd.text(rd.require(walls[i], "material", path), path + ".material");
    auto it = std::find_if(sc.materials.begin(), sc.materials.end(),
                           [&](const Material& m) { return m.name == name; });
    if (it == sc.materials.end())
      rd.fail(path + ".material", fmt::format("undeclared material '{}'", name));
    w.material = *it;
    sc.walls.push_back(std::move(w));
  }

  if (auto it = doc.find("rig"); it != doc.end()) {
    const Json& rig = *it;
    if (!rig.is_object()) rd.fail("rig", "expected an object");
    if (rig.contains("lidar_offset")) sc.rig.lidar_offset = rd.point(rig["lidar_offset"], "rig.lidar_offset");
    if (rig.contains("initiator_offset"))
      sc.rig.initiator_offset = rd.point(rig["initiator_offset"], "rig.initiator_offset");
    if (rig.contains("responder_offset"))
      sc.rig.responder_offset = rd.point(rig["responder_offset"], "rig.responder_offset");
    if (rig.contains("array_boresight_deg"))
      sc.rig.array_boresight =
          wrap_angle(deg2rad(rd.number(rig["array_boresight_deg"], "rig.array_boresight_deg")));
    if (rig.contains("direct_path_blocked"))
      sc.rig.direct_path_blocked = rd.boolean(rig["direct_path_blocked"], "rig.direct_path_blocked");
  }

  const Json& route = rd.require(doc, "route", "");
  if (!route.is_array()) rd.fail("route", "expected an array");
  for (std::size_t i = 0; i < route.size(); ++i) {
    const std::string path = fmt::format("route[{}]", i);
    TimedPose tp;
    tp.t = rd.number(rd.require(route[i], "t", path), path + ".t");
    tp.pose.x = rd.number(rd.require(route[i], "x", path), path + ".x");
    tp.pose.y = rd.number(rd.require(route[i], "y", path), path + ".y");
    tp.pose.theta =
        wrap_angle(deg2rad(rd.number(rd.require(route[i], "theta_deg", path), path + ".theta_deg")));
    sc.route.push_back(tp);
  }

  const Json& seed = rd.require(doc, "seed", "");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    rd.fail("seed", "expected a non-negative integer");
  sc.rng_seed = seed.get<std::uint64_t>();

  try {
    sc.validate();
  } catch (const ScenarioError& e) {
    throw ScenarioError(fmt::format("{}: {}", source_name, e.what()));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(fmt::format("{}: cannot open scenario file", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const Scenario& sc) {
  Json doc;
  doc["waveslam_scenario"] = kScenarioSchemaVersion;
  Json materials = Json::array();
  for (const Material& m : sc.materials)
    materials.push_back({{"name", m.name},
                         {"reflection_loss_db", m.reflection_loss_db},
                         {"lidar_opaque", m.lidar_opaque}});
  doc["materials"] = std::move(materials);

  Json walls = Json::array();
  for (const WallSegment& w : sc.walls)
    walls.push_back({{"a", point_json(w.a)}, {"b", point_json(w.b)}, {"material", w.material.name}});
  doc["walls"] = std::move(walls);

  doc["rig"] = {{"lidar_offset", point_json(sc.rig.lidar_offset)},
                {"initiator_offset", point_json(sc.rig.initiator_offset)},
                {"responder_offset", point_json(sc.rig.responder_offset)},
                {"array_boresight_deg", degrees_for_exact_roundtrip(sc.rig.array_boresight)},
                {"direct_path_blocked", sc.rig.direct_path_blocked}};

  Json route = Json::array();
  for (const TimedPose& tp : sc.route)
    route.push_back({{"t", tp.t},
                     {"x", tp.pose.x},
                     {"y", tp.pose.y},
                     {"theta_deg", degrees_for_exact_roundtrip(tp.pose.theta)}});
  doc["route"] = std::move(route);
  doc["seed"] = sc.rng_seed;
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError(fmt::format("{}: cannot write scenario file", path.string()));
  out << serialize_scenario(scenario);
}

std::optional<std::pair<double, double>> segment_intersection(const Vec2& p, const Vec2& q,
                                                              const Vec2& a, const Vec2& b) {
  const Vec2 d = q - p;
  const Vec2 e = b - a;
  const double denom = cross(d, e);
  if (std::abs(denom) <= 1e-15 * d.norm() * e.norm()) return std::nullopt;
  const Vec2 ap = a - p;
  return std::make_pair(cross(ap, e) / denom, cross(ap, d) / denom);
}

std::optional<RayHit> raycast(const Vec2& origin, const Vec2& direction,
                              std::span<const WallSegment> walls, const MaterialFilter& filter) {
  constexpr double kMinDistance = 1e-12;
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const WallSegment& w = walls[i];
    if (filter && !filter(w.material)) continue;
    auto ts = segment_intersection(origin, origin + direction, w.a, w.b);
    if (!ts) continue;
    const auto [t, s] = *ts;
    if (t <= kMinDistance || s < 0.0 || s > 1.0) continue;
    if (!best || t < best->distance) best = RayHit{origin + t * direction, t, i};
  }
  return best;
}

std::vector<TimedPose> random_walk_route(std::span<const WallSegment> walls, const Pose& start,
                                         int steps, double step_length, double dt,
                                         double max_turn, double clearance, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0, 0x77a1);
  std::uniform_real_distribution<double> turn(-max_turn, max_turn);
  std::vector<TimedPose> route{{0.0, start}};
  Pose pose = start;
  for (int i = 1; i <= steps; ++i) {
    double heading = wrap_angle(pose.theta + turn(rng));
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto hit = raycast(pose.position(), unit_vector(heading), walls);
      if (!hit || hit->distance > clearance + step_length) break;
      heading = wrap_angle(heading + std::numbers::pi / 2.0 + std::abs(turn(rng)));
    }
    pose = {pose.x + step_length * std::cos(heading), pose.y + step_length * std::sin(heading), heading};
    route.push_back({i * dt, pose});
  }
  return route;
}

}  // namespace waveslam
