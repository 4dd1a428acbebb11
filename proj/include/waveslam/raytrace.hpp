#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "waveslam/environment.hpp"

namespace waveslam {

// 802.11ad channel 2.
inline constexpr double kDefaultCarrierHz = 60.48e9;

inline double wavelength(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

// One specular propagation path from Initiator to Responder.
struct RayPath {
  std::complex<double> gain;
  double elevation = 0.0;  // always 0 in the planar world
  double azimuth = 0.0;    // arrival direction at the Responder, relative to boresight
  double delay = 0.0;      // seconds
  int order = 0;
  std::vector<Vec2> vertices;      // launch, bounces..., arrival
  std::vector<std::size_t> walls;  // wall index per bounce

  double length() const;
};

struct TraceOptions {
  int max_order = 2;
  bool include_direct = false;
  double carrier_hz = kDefaultCarrierHz;
};

// Image-method enumeration of every specular path up to `max_order` bounces,
// each leg checked for occlusion against all walls. Paths come back sorted by
// descending |gain|.
std::vector<RayPath> trace_paths(const Vec2& initiator, const Vec2& responder,
                                 double responder_boresight, std::span<const WallSegment> walls,
                                 const TraceOptions& options = {});

// Mirror image of `p` across the infinite line through the wall.
Vec2 mirror_across(const Vec2& p, const WallSegment& wall);

// Debug dump: order,length_m,gain_db,azimuth_deg per row.
std::string paths_to_csv(std::span<const RayPath> paths);

}  // namespace waveslam
