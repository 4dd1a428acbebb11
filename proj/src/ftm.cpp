#include "waveslam/ftm.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace waveslam {

namespace {

double quantize(double t, double q) { return q > 0.0 ? std::round(t / q) * q : t; }

}  // namespace

FtmBurst simulate_burst(double true_tof_s, int n, const ClockModel& clock, double sifs_s, Rng& rng,
                        const BurstSchedule& schedule) {
  if (n < 1 || n > kMaxBurstMeasurements)
    throw std::invalid_argument("simulate_burst: n must be in [1, 32]");
  if (!(true_tof_s > 0.0)) throw std::invalid_argument("simulate_burst: tof must be positive");
  if (clock.quantization_s < 0.0 || clock.jitter_sigma_s < 0.0)
    throw std::invalid_argument("simulate_burst: negative clock parameter");

  const double rate = 1.0 + clock.drift_ppm * 1e-6;
  auto responder_clock = [&](double tau) { return clock.offset_s + tau * rate; };
  std::uniform_real_distribution<double> dispatch(0.0, schedule.dispatch_jitter_s);

  // Exchange x: FTM frame sent at τ1, received after tof, Ack after SIFS.
  struct Exchange {
    double t1, t2, t3, t4;
  };
  std::vector<Exchange> exchanges;
  exchanges.reserve(static_cast<std::size_t>(n) + 1);
  for (int x = 0; x <= n; ++x) {
    const double tau1 = x * schedule.min_delta_s + (schedule.dispatch_jitter_s > 0.0 ? dispatch(rng) : 0.0);
    const double tau2 = tau1 + true_tof_s;
    const double tau3 = tau2 + sifs_s;
    const double tau4 = tau3 + true_tof_s;
    Exchange e;
    e.t1 = quantize(responder_clock(tau1), clock.quantization_s);
    e.t2 = quantize(tau2 + gaussian(rng, clock.jitter_sigma_s), clock.quantization_s);
    e.t3 = quantize(tau3, clock.quantization_s);
    e.t4 = quantize(responder_clock(tau4) + gaussian(rng, clock.jitter_sigma_s), clock.quantization_s);
    exchanges.push_back(e);
  }

  FtmBurst burst;
  burst.first_frame_zeroed = true;
  for (int frame = 1; frame <= n + 1; ++frame) {
    const Exchange& own = exchanges[static_cast<std::size_t>(frame - 1)];
    FtmFrame f{frame, 0.0, own.t2, own.t3, 0.0};
    if (frame > 1) {
      const Exchange& prev = exchanges[static_cast<std::size_t>(frame - 2)];
      f.t1 = prev.t1;
      f.t4 = prev.t4;
    }
    burst.trace.push_back(f);
  }
  // Frame N + 1 completes measurement N: its t1/t4 fields pair with the
  // Initiator's own t2/t3 from frame N.
  for (int frame = 2; frame <= n + 1; ++frame) {
    const FtmFrame& report = burst.trace[static_cast<std::size_t>(frame - 1)];
    const FtmFrame& local = burst.trace[static_cast<std::size_t>(frame - 2)];
    burst.measurements.push_back({report.t1, local.t2, local.t3, report.t4});
  }
  return burst;
}

double estimate_tof(const FtmBurst& burst) {
  if (burst.measurements.empty()) throw std::invalid_argument("estimate_tof: empty burst");
  double sum = 0.0;
  for (const FtmMeasurement& m : burst.measurements) sum += (m.t4 - m.t1) - (m.t3 - m.t2);
  return sum / (2.0 * static_cast<double>(burst.measurements.size()));
}

std::string format_trace(const FtmBurst& burst) {
  std::string out;
  for (const FtmFrame& f : burst.trace)
    out += fmt::format("{} responder->initiator t1={:.4f} t2={:.4f} t3={:.4f} t4={:.4f}\n", f.index,
                       f.t1 * 1e9, f.t2 * 1e9, f.t3 * 1e9, f.t4 * 1e9);
  return out;
}

}  // namespace waveslam
