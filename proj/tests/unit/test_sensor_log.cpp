#include <doctest.h>

#include "waveslam/sensor_log.hpp"

using namespace waveslam;

namespace {

CsiMatrix random_csi(Rng& rng, int k, int j) {
  std::normal_distribution<double> n(0.0, 1e-4);
  CsiMatrix h(k, j);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < j; ++b) h(a, b) = {n(rng), n(rng)};
  return h;
}

std::vector<LogRecord> sample_log(Rng& rng) {
  std::vector<LogRecord> log;
  for (int e = 0; e < 5; ++e) {
    const double t = 0.1 * e + 1.0 / 3.0;
    log.push_back(OdomRecord{t, {0.1 * e, -0.2 / 3.0, 0.7 * e}});
    LidarRecord l{t + 1e-6, deg2rad(90.0), 12.0, {1.0 / 7.0, std::nullopt, 2.5, std::nullopt}};
    log.push_back(l);
    log.push_back(CsiRecord{t + 2e-6, random_csi(rng, 6, 6)});
    log.push_back(FtmRecord{t + 3e-6, {{0.0123, 1e-9 / 3.0, 4e-9, 0.0123 + 1e-8}}});
  }
  return log;
}

}  // namespace

TEST_CASE("csi payload round-trips bit-exactly") {
  Rng rng(1);
  const CsiMatrix h = random_csi(rng, 6, 4);
  const auto bytes = encode_csi_payload(h, 0.125);
  CHECK(bytes.size() == 4 + 4 + 8 + 6 * 4 * 16);
  // little-endian K first
  CHECK(bytes[0] == 6);
  CHECK(bytes[4] == 4);
  const auto [back, t] = decode_csi_payload(bytes);
  CHECK(back == h);
  CHECK(t == 0.125);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_csi_payload(truncated), LogError);
  auto longer = bytes;
  longer.push_back(0);
  CHECK_THROWS_AS(decode_csi_payload(longer), LogError);
}

TEST_CASE("every record type round-trips through JSONL") {
  Rng rng(2);
  const auto log = sample_log(rng);
  const std::string text = encode_log(log);
  const auto back = decode_log(text, "log.jsonl");
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back[i].index() == log[i].index());
    CHECK(record_time(back[i]) == record_time(log[i]));
  }
  CHECK(encode_log(back) == text);
  const auto& lidar = std::get<LidarRecord>(back[1]);
  CHECK(lidar.ranges[0] == 1.0 / 7.0);
  CHECK_FALSE(lidar.ranges[1]);
  CHECK(std::get<CsiRecord>(back[2]).h == std::get<CsiRecord>(log[2]).h);
  CHECK(std::get<FtmRecord>(back[3]).measurements == std::get<FtmRecord>(log[3]).measurements);
  CHECK(std::get<OdomRecord>(back[4]).pose == std::get<OdomRecord>(log[4]).pose);
}

TEST_CASE("records are one line each") {
  Rng rng(3);
  for (const LogRecord& r : sample_log(rng)) CHECK(encode_record(r).find('\n') == std::string::npos);
}

TEST_CASE("decode errors carry source and line") {
  Rng rng(4);
  const auto log = sample_log(rng);
  std::string text = encode_log(log);
  const auto second_line = text.find('\n') + 1;
  std::string broken = text;
  broken.insert(second_line, "{not json}\n");
  try {
    decode_log(broken, "log.jsonl");
    FAIL("expected LogError");
  } catch (const LogError& e) {
    CHECK(std::string(e.what()).rfind("log.jsonl:2:", 0) == 0);
  }

  // swapping two records breaks time order
  std::vector<LogRecord> swapped = log;
  std::swap(swapped[0], swapped[1]);
  try {
    decode_log(encode_log(swapped), "log.jsonl");
    FAIL("expected LogError");
  } catch (const LogError& e) {
    CHECK(std::string(e.what()).find("log.jsonl:2:") != std::string::npos);
  }

  CHECK_THROWS_AS(decode_record(R"({"v": 2, "type": "odom", "t": 0})"), LogError);
  CHECK_THROWS_AS(decode_record(R"({"v": 1, "type": "sonar", "t": 0})"), LogError);
  CHECK_THROWS_AS(decode_record(R"({"v": 1, "type": "ftm", "t": 0, "measurements": [[1, 2, 3]]})"), LogError);
}

TEST_CASE("empty log decodes to nothing") {
  CHECK(decode_log("").empty());
  CHECK(encode_log(std::vector<LogRecord>{}).empty());
}
