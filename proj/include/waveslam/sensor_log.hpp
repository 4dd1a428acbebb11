#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "waveslam/ftm.hpp"
#include "waveslam/mmwave_phy.hpp"

namespace waveslam {

inline constexpr int kSensorLogVersion = 1;

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdomRecord {
  double t = 0.0;
  Pose pose;
};

struct LidarRecord {
  double t = 0.0;
  double angular_step = 0.0;
  double max_range = 0.0;
  std::vector<std::optional<double>> ranges;  // beam i at bearing i·angular_step
};

struct CsiRecord {
  double t = 0.0;
  CsiMatrix h;
};

struct FtmRecord {
  double t = 0.0;
  std::vector<FtmMeasurement> measurements;
};

using LogRecord = std::variant<OdomRecord, LidarRecord, CsiRecord, FtmRecord>;

double record_time(const LogRecord& record);

// CSI binary payload: u32 K, u32 J, f64 timestamp, then K·J interleaved
// (re, im) f64 pairs in row-major order; little-endian.
std::vector<std::uint8_t> encode_csi_payload(const CsiMatrix& h, double timestamp);
std::pair<CsiMatrix, double> decode_csi_payload(std::span<const std::uint8_t> bytes);

// One JSON object per line (no trailing newline).
std::string encode_record(const LogRecord& record);
LogRecord decode_record(std::string_view line);

std::string encode_log(std::span<const LogRecord> records);
// Parses a JSONL log; errors carry `source:line`. Record times must increase.
std::vector<LogRecord> decode_log(const std::string& text, const std::string& source = "<log>");

}  // namespace waveslam
