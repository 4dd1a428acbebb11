#include "waveslam/geometry.hpp"

namespace waveslam {

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

Vec2 Pose::transform(const Vec2& local) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {x + c * local.x() - s * local.y(), y + s * local.x() + c * local.y()};
}

Pose Pose::compose(const Pose& delta) const {
  const Vec2 p = transform(delta.position());
  return {p.x(), p.y(), wrap_angle(theta + delta.theta)};
}

Pose Pose::between(const Pose& other) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double dx = other.x - x;
  const double dy = other.y - y;
  return {c * dx + s * dy, -s * dx + c * dy, wrap_angle(other.theta - theta)};
}

Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace waveslam
