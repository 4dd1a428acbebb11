#pragma once

#include <string>
#include <vector>

#include "waveslam/geometry.hpp"

namespace waveslam {

// Responder clock relative to the Initiator clock:
//   responder_time(τ) = offset_s + τ·(1 + drift_ppm·1e-6)
// Reception timestamps (t2, t4) carry Gaussian jitter; all four timestamps
// are rounded to the nearest multiple of quantization_s (0 disables).
struct ClockModel {
  double offset_s = 0.0;
  double drift_ppm = 0.0;
  double quantization_s = 0.0;
  double jitter_sigma_s = 0.0;
};

struct FtmMeasurement {
  double t1 = 0.0;  // Responder clock, FTM frame sent
  double t2 = 0.0;  // Initiator clock, FTM frame received
  double t3 = 0.0;  // Initiator clock, Ack sent
  double t4 = 0.0;  // Responder clock, Ack received

  bool operator==(const FtmMeasurement&) const = default;
};

// One FTM frame as seen on air. t1/t4 are the fields the Responder writes
// into the frame (they describe the previous exchange; zero in frame 1);
// t2/t3 are the Initiator's local stamps for this frame's exchange.
struct FtmFrame {
  int index = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
};

inline constexpr int kMaxBurstMeasurements = 32;

struct FtmBurst {
  std::vector<FtmMeasurement> measurements;
  bool first_frame_zeroed = true;
  std::vector<FtmFrame> trace;  // n + 1 frames when produced by simulate_burst
};

// Frame scheduling inside a burst.
struct BurstSchedule {
  double min_delta_s = 100e-6;       // nominal spacing of consecutive FTM frames
  double dispatch_jitter_s = 9e-6;   // uniform channel-access delay per frame
};

inline constexpr double kDefaultSifs = 3e-6;

// Simulates one burst of n measurements. The Responder sends n + 1 FTM
// frames; frame N reports t1/t4 of exchange N − 1 and frame 1 reports zeros.
// Measurements are reassembled from that on-air bookkeeping.
FtmBurst simulate_burst(double true_tof_s, int n, const ClockModel& clock, double sifs_s, Rng& rng,
                        const BurstSchedule& schedule = {});

// ToF = (1/2n)·Σ ((t4 − t1) − (t3 − t2)).
double estimate_tof(const FtmBurst& burst);

// One line per frame: index, role, then t1..t4 in nanoseconds.
std::string format_trace(const FtmBurst& burst);

}  // namespace waveslam
