#include "waveslam/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace waveslam {

double RayPath::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) total += (vertices[i] - vertices[i - 1]).norm();
  return total;
}

Vec2 mirror_across(const Vec2& p, const WallSegment& wall) {
  const Vec2 dir = (wall.b - wall.a).normalized();
  const Vec2 rel = p - wall.a;
  const Vec2 along = rel.dot(dir) * dir;
  return wall.a + 2.0 * along - rel;
}

namespace {

constexpr double kEndpointTolerance = 1e-9;

// True when the open segment p→q crosses any wall other than those listed.
bool occluded(const Vec2& p, const Vec2& q, std::span<const WallSegment> walls,
              std::size_t skip_a, std::size_t skip_b) {
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (i == skip_a || i == skip_b) continue;
    auto ts = segment_intersection(p, q, walls[i].a, walls[i].b);
    if (!ts) continue;
    const auto [t, s] = *ts;
    if (t > kEndpointTolerance && t < 1.0 - kEndpointTolerance && s >= 0.0 && s <= 1.0) return true;
  }
  return false;
}

class Tracer {
 public:
  Tracer(const Vec2& initiator, const Vec2& responder, double boresight,
         std::span<const WallSegment> walls, const TraceOptions& options)
      : initiator_(initiator), responder_(responder), boresight_(boresight), walls_(walls),
        options_(options), lambda_(wavelength(options.carrier_hz)) {}

  std::vector<RayPath> run() {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    if (options_.include_direct && !occluded(initiator_, responder_, walls_, kNone, kNone))
      emit({initiator_, responder_}, {});
    images_.push_back(initiator_);
    expand();
    std::stable_sort(paths_.begin(), paths_.end(), [](const RayPath& a, const RayPath& b) {
      return std::abs(a.gain) > std::abs(b.gain);
    });
    return std::move(paths_);
  }

 private:
  void expand() {
    for (std::size_t w = 0; w < walls_.size(); ++w) {
      if (!sequence_.empty() && sequence_.back() == w) continue;
      sequence_.push_back(w);
      images_.push_back(mirror_across(images_.back(), walls_[w]));
      resolve();
      if (static_cast<int>(sequence_.size()) < options_.max_order) expand();
      images_.pop_back();
      sequence_.pop_back();
    }
  }

  // Back-propagates from the Responder through the image chain of the current
  // wall sequence; emits the path if every bounce lands on its segment and no
  // leg is blocked.
  void resolve() {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    const std::size_t n = sequence_.size();
    std::vector<Vec2> bounces(n);
    Vec2 target = responder_;
    for (std::size_t k = n; k-- > 0;) {
      const WallSegment& wall = walls_[sequence_[k]];
      auto ts = segment_intersection(target, images_[k + 1], wall.a, wall.b);
      if (!ts) return;
      const auto [t, s] = *ts;
      if (t <= kEndpointTolerance || t >= 1.0 - kEndpointTolerance || s < 0.0 || s > 1.0) return;
      bounces[k] = target + t * (images_[k + 1] - target);
      target = bounces[k];
    }
    std::vector<Vec2> vertices;
    vertices.reserve(n + 2);
    vertices.push_back(initiator_);
    vertices.insert(vertices.end(), bounces.begin(), bounces.end());
    vertices.push_back(responder_);
    for (std::size_t leg = 0; leg + 1 < vertices.size(); ++leg) {
      const std::size_t from = leg == 0 ? kNone : sequence_[leg - 1];
      const std::size_t to = leg == n ? kNone : sequence_[leg];
      if (occluded(vertices[leg], vertices[leg + 1], walls_, from, to)) return;
    }
    emit(std::move(vertices), sequence_);
  }

  void emit(std::vector<Vec2> vertices, std::vector<std::size_t> wall_ids) {
    RayPath path;
    path.vertices = std::move(vertices);
    path.walls = std::move(wall_ids);
    path.order = static_cast<int>(path.walls.size());
    const double length = path.length();
    double loss_db = 0.0;
    for (std::size_t w : path.walls) loss_db += walls_[w].material.reflection_loss_db;
    const double amplitude =
        lambda_ / (4.0 * std::numbers::pi * length) * std::pow(10.0, -loss_db / 20.0);
    path.gain = std::polar(amplitude, -2.0 * std::numbers::pi * length / lambda_);
    path.delay = length / kSpeedOfLight;
    const Vec2 arrival = path.vertices[path.vertices.size() - 2] - responder_;
    path.azimuth = wrap_angle(std::atan2(arrival.y(), arrival.x()) - boresight_);
    path.elevation = 0.0;
    paths_.push_back(std::move(path));
  }

  Vec2 initiator_;
  Vec2 responder_;
  double boresight_;
  std::span<const WallSegment> walls_;
  TraceOptions options_;
  double lambda_;
  std::vector<std::size_t> sequence_;
  std::vector<Vec2> images_;
  std::vector<RayPath> paths_;
};

}  // namespace

std::vector<RayPath> trace_paths(const Vec2& initiator, const Vec2& responder,
                                 double responder_boresight, std::span<const WallSegment> walls,
                                 const TraceOptions& options) {
  if (options.max_order < 1 || options.max_order > 3)
    throw std::invalid_argument("trace_paths: max_order must be in [1, 3]");
  if (initiator == responder) throw std::invalid_argument("trace_paths: initiator equals responder");
  if (!(options.carrier_hz > 0.0)) throw std::invalid_argument("trace_paths: carrier must be positive");
  return Tracer(initiator, responder, responder_boresight, walls, options).run();
}

std::string paths_to_csv(std::span<const RayPath> paths) {
  std::string out = "order,length_m,gain_db,azimuth_deg\n";
  for (const RayPath& p : paths)
    out += fmt::format("{},{},{},{}\n", p.order, p.length(), 20.0 * std::log10(std::abs(p.gain)),
                       rad2deg(p.azimuth));
  return out;
}

}  // namespace waveslam
