// Freezes the "paper_calibrated" noise profile.
//
// Fixed parts (clock offset/drift, quantization, elevation jitter, LiDAR and
// odometry noise) are set below. The two free parameters are swept on the
// single-wall capability geometry over seeds 1001..1010, which are kept
// apart from the seeds the tests use:
//   1. FTM jitter sigma_t: largest value with 80th-percentile distance error
//      <= 10 cm at 1, 3 and 5 m and every distance error <= 16.5 cm
//      (a 25% margin under 22 cm), for every seed.
//   2. CSI noise sigma: largest value on a log grid from 1e-7 with every azimuth error
//      of the angle sweep <= 15 deg (margin under 20 deg), for every seed.
//
// usage: calibrate_profile [OUT.json]

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "waveslam/capabilities.hpp"

using namespace waveslam;

namespace {

constexpr std::uint64_t kFirstSeed = 1001;
constexpr int kSeeds = 10;
constexpr double kP80Limit = 0.10;
constexpr double kMaxDistanceLimit = 0.165;
constexpr double kMaxAzimuthLimit = 15.0;

NoiseProfile base_profile() {
  NoiseProfile p;
  p.name = "paper_calibrated";
  p.clock = {0.0123, 2.0, 0.1e-9, 0.0};
  p.ftm_reference_gain_db = reference_path_gain_db();
  p.csi_noise_sigma = 0.0;
  p.elevation_jitter_sigma = deg2rad(1.0);
  p.lidar_sigma = 0.02;
  p.lidar_dropout = 0.0;
  p.odometry = {0.01, 0.02};
  return p;
}

struct Worst {
  double p80 = 0.0;           // over 1..5 m
  double max_distance = 0.0;  // over all distances
  double max_azimuth = 0.0;
};

Worst evaluate(const NoiseProfile& profile, CapabilityMode mode) {
  Worst w;
  for (int s = 0; s < kSeeds; ++s) {
    CapabilityOptions o;
    o.mode = mode;
    o.profile = profile;
    o.seed = kFirstSeed + static_cast<std::uint64_t>(s);
    const auto samples = run_capabilities(o).samples();
    for (const auto& [metric, group] : sample_groups(samples)) {
      const auto v = select_values(samples, metric, group);
      const double mx = *std::max_element(v.begin(), v.end());
      if (metric == "distance_error_m") {
        w.max_distance = std::max(w.max_distance, mx);
        if (group != "d=7") w.p80 = std::max(w.p80, percentile(v, 0.8));
      } else {
        w.max_azimuth = std::max(w.max_azimuth, mx);
      }
    }
  }
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : (profile_directory() / "paper_calibrated.json").string();
  NoiseProfile profile = base_profile();

  // Both criteria tighten monotonically with the noise level, so bisect on a
  // grid: 0.01 ns steps for sigma_t, tenth-decades for the CSI noise.
  auto bisect = [](int lo, int hi, auto passes) {
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (passes(mid) ? lo : hi) = mid;
    }
    return lo;
  };

  const int jitter_steps = bisect(0, 400, [&](int step) {
    profile.clock.jitter_sigma_s = step * 0.01e-9;
    const Worst w = evaluate(profile, CapabilityMode::distance);
    std::cout << fmt::format("sigma_t {:.2f} ns  worst p80 {:.4f} m  worst max {:.4f} m\n",
                             profile.clock.jitter_sigma_s * 1e9, w.p80, w.max_distance);
    return w.p80 <= kP80Limit && w.max_distance <= kMaxDistanceLimit;
  });
  const double best_jitter = jitter_steps * 0.01e-9;
  profile.clock.jitter_sigma_s = best_jitter;

  auto noise_at = [](int step) { return 1e-7 * std::pow(10.0, step / 10.0); };
  const int noise_steps = bisect(0, 60, [&](int step) {
    profile.csi_noise_sigma = noise_at(step);
    const Worst w = evaluate(profile, CapabilityMode::angle);
    std::cout << fmt::format("csi sigma {:.3e}  worst azimuth {:.3f} deg  worst distance {:.4f} m\n",
                             profile.csi_noise_sigma, w.max_azimuth, w.max_distance);
    return w.max_azimuth <= kMaxAzimuthLimit && w.max_distance <= kMaxDistanceLimit;
  });
  const double best_noise = noise_at(noise_steps);
  profile.csi_noise_sigma = best_noise;

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << serialize_profile(profile);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  std::cout << fmt::format("wrote {} (sigma_t {:.2f} ns, csi sigma {:.3e})\n", out_path, best_jitter * 1e9, best_noise);
  return 0;
}
