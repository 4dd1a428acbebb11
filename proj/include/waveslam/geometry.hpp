#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Core>

namespace waveslam {

using Vec2 = Eigen::Vector2d;
using Rng = std::mt19937_64;

inline constexpr double kSpeedOfLight = 299792458.0;

inline double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

// z-component of the 3D cross product of two planar vectors.
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Planar rigid-body pose. theta is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }

  // Maps a point given in this pose's frame to the world frame.
  Vec2 transform(const Vec2& local) const;

  // this ⊕ delta, where delta is expressed in this pose's frame.
  Pose compose(const Pose& delta) const;

  // The delta d such that this->compose(d) == other.
  Pose between(const Pose& other) const;

  bool operator==(const Pose&) const = default;
};

// Zero-mean Gaussian draw scaled by sigma; sigma == 0 yields exactly 0.
inline double gaussian(Rng& rng, double sigma) {
  std::normal_distribution<double> unit(0.0, 1.0);
  return sigma * unit(rng);
}

// Independent deterministic stream derived from (seed, index, stream).
Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

}  // namespace waveslam
