#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "waveslam/ftm.hpp"

using namespace waveslam;

namespace {

double std_dev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size() - 1));
}

double mean_error(double tof, int n, const ClockModel& clock, int bursts, std::uint64_t seed) {
  double sum = 0.0;
  for (int b = 0; b < bursts; ++b) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(b), 0);
    sum += estimate_tof(simulate_burst(tof, n, clock, kDefaultSifs, rng)) - tof;
  }
  return sum / bursts;
}

}  // namespace

TEST_CASE("offset cancels exactly without noise") {
  Rng rng(1);
  const ClockModel clock{1e-3, 0.0, 0.0, 0.0};
  const auto burst = simulate_burst(10e-9, 1, clock, kDefaultSifs, rng);
  REQUIRE(burst.measurements.size() == 1);
  const auto& m = burst.measurements[0];
  CHECK(((m.t4 - m.t1) - (m.t3 - m.t2)) / 2 == doctest::Approx(10e-9).epsilon(1e-9));
}

TEST_CASE("quantization bounds the per-measurement error") {
  Rng rng(2);
  const ClockModel clock{0.37e-3, 0.0, 0.1e-9, 0.0};
  const auto burst = simulate_burst(10e-9, 32, clock, kDefaultSifs, rng);
  for (const auto& m : burst.measurements) {
    const double tof = ((m.t4 - m.t1) - (m.t3 - m.t2)) / 2;
    CHECK(std::abs(tof - 10e-9) <= 0.1e-9 + 1e-18);
    CHECK(m.t3 >= m.t2);
  }
}

TEST_CASE("estimate_tof arithmetic") {
  FtmBurst b;
  b.measurements = {{0.0, 5e-9, 15e-9, 40e-9}};
  CHECK(estimate_tof(b) == doctest::Approx(15e-9).epsilon(1e-12));
  b.measurements.push_back(b.measurements[0]);
  CHECK(estimate_tof(b) == doctest::Approx(15e-9).epsilon(1e-12));
  CHECK_THROWS(estimate_tof(FtmBurst{}));
}

TEST_CASE("noiseless round trip at 7 m") {
  Rng rng(3);
  const ClockModel clock{0.0123, 0.0, 0.0, 0.0};
  const double tof = 23.35e-9;
  CHECK(std::abs(estimate_tof(simulate_burst(tof, 8, clock, kDefaultSifs, rng)) - tof) < 1e-15);
}

TEST_CASE("jitter averages down as sigma sqrt(2)/2/sqrt(n)") {
  const ClockModel clock{0.0123, 0.0, 0.0, 0.2e-9};
  const double tof = 3.0 / kSpeedOfLight;
  std::vector<double> errors;
  for (int b = 0; b < 10000; ++b) {
    Rng rng = make_stream(77, static_cast<std::uint64_t>(b), 0);
    errors.push_back(estimate_tof(simulate_burst(tof, 32, clock, kDefaultSifs, rng)) - tof);
  }
  const double analytic = 0.2e-9 * std::sqrt(2.0) / 2.0 / std::sqrt(32.0);
  CHECK(std_dev(errors) == doctest::Approx(analytic).epsilon(0.10));
}

TEST_CASE("offset invariance over random offsets") {
  Rng offsets(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const ClockModel clock{u(offsets), 0.0, 0.1e-9, 0.0};
    Rng rng(static_cast<std::uint64_t>(i));
    CHECK(std::abs(estimate_tof(simulate_burst(10e-9, 1, clock, kDefaultSifs, rng)) - 10e-9) <= 0.1e-9);
  }
}

TEST_CASE("drift bias is linear in drift and vanishes without it") {
  const double tof = 15e-9;
  const ClockModel none{0.01, 0.0, 0.0, 0.0};
  const ClockModel one{0.01, 5.0, 0.0, 0.0};
  const ClockModel two{0.01, 10.0, 0.0, 0.0};
  const double b0 = mean_error(tof, 8, none, 200, 5);
  const double b1 = mean_error(tof, 8, one, 200, 5);
  const double b2 = mean_error(tof, 8, two, 200, 5);
  CHECK(std::abs(b0) < 1e-16);
  CHECK(b1 > 0.0);
  CHECK(b2 / b1 == doctest::Approx(2.0).epsilon(1e-4));
  // responder timeline stretch over tof plus half the turnaround
  CHECK(b1 == doctest::Approx(5e-6 * (tof + kDefaultSifs / 2)).epsilon(1e-4));
}

TEST_CASE("estimate is permutation invariant") {
  Rng rng(6);
  const ClockModel clock{0.2, 1.0, 0.1e-9, 0.3e-9};
  auto burst = simulate_burst(12e-9, 16, clock, kDefaultSifs, rng);
  const double before = estimate_tof(burst);
  std::reverse(burst.measurements.begin(), burst.measurements.end());
  std::rotate(burst.measurements.begin(), burst.measurements.begin() + 5, burst.measurements.end());
  CHECK(estimate_tof(burst) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("protocol trace: frame N reports exchange N-1, frame 1 zeroed") {
  Rng rng(7);
  const ClockModel clock{0.5, 0.0, 0.0, 0.0};
  const auto burst = simulate_burst(10e-9, 4, clock, kDefaultSifs, rng);
  CHECK(burst.first_frame_zeroed);
  REQUIRE(burst.trace.size() == 5);
  CHECK(burst.measurements.size() == 4);
  CHECK(burst.trace[0].t1 == 0.0);
  CHECK(burst.trace[0].t4 == 0.0);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(burst.measurements[x].t1 == burst.trace[x + 1].t1);
    CHECK(burst.measurements[x].t4 == burst.trace[x + 1].t4);
    CHECK(burst.measurements[x].t2 == burst.trace[x].t2);
    CHECK(burst.measurements[x].t3 == burst.trace[x].t3);
  }
  const std::string text = format_trace(burst);
  std::istringstream in(text);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("1 responder->initiator t1=0.0000", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("burst preconditions") {
  Rng rng(1);
  CHECK_THROWS(simulate_burst(1e-9, 0, {}, kDefaultSifs, rng));
  CHECK_THROWS(simulate_burst(1e-9, 33, {}, kDefaultSifs, rng));
  CHECK_THROWS(simulate_burst(0.0, 1, {}, kDefaultSifs, rng));
  CHECK_NOTHROW(simulate_burst(1e-9, 32, {}, kDefaultSifs, rng));
}
