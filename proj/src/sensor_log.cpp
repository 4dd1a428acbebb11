#include "waveslam/sensor_log.hpp"

#include <cstring>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "waveslam/encoding.hpp"

namespace waveslam {

using Json = nlohmann::ordered_json;

double record_time(const LogRecord& record) {
  return std::visit([](const auto& r) { return r.t; }, record);
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T take(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw LogError("csi payload truncated");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

double number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw LogError(fmt::format("field '{}' missing or not a number", key));
  return it->get<double>();
}

}  // namespace

std::vector<std::uint8_t> encode_csi_payload(const CsiMatrix& h, double timestamp) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + static_cast<std::size_t>(h.size()) * 16);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.cols()));
  put<double>(out, timestamp);
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      put<double>(out, h(k, j).real());
      put<double>(out, h(k, j).imag());
    }
  return out;
}

std::pair<CsiMatrix, double> decode_csi_payload(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const auto k = take<std::uint32_t>(bytes, pos);
  const auto j = take<std::uint32_t>(bytes, pos);
  const double timestamp = take<double>(bytes, pos);
  if (k == 0 || j == 0 || k > 1024 || j > 1024) throw LogError("csi payload has invalid dimensions");
  CsiMatrix h(k, j);
  for (Eigen::Index r = 0; r < h.rows(); ++r)
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      const double re = take<double>(bytes, pos);
      const double im = take<double>(bytes, pos);
      h(r, c) = {re, im};
    }
  if (pos != bytes.size()) throw LogError("csi payload has trailing bytes");
  return {std::move(h), timestamp};
}

std::string encode_record(const LogRecord& record) {
  Json j;
  j["v"] = kSensorLogVersion;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, OdomRecord>) {
          j["type"] = "odom";
          j["t"] = r.t;
          j["x"] = r.pose.x;
          j["y"] = r.pose.y;
          j["theta"] = r.pose.theta;
        } else if constexpr (std::is_same_v<T, LidarRecord>) {
          j["type"] = "lidar";
          j["t"] = r.t;
          j["angular_step"] = r.angular_step;
          j["max_range"] = r.max_range;
          Json ranges = Json::array();
          for (const auto& range : r.ranges) ranges.push_back(range ? Json(*range) : Json(nullptr));
          j["ranges"] = std::move(ranges);
        } else if constexpr (std::is_same_v<T, CsiRecord>) {
          j["type"] = "csi";
          j["t"] = r.t;
          j["k"] = r.h.rows();
          j["j"] = r.h.cols();
          j["payload"] = base64_encode(encode_csi_payload(r.h, r.t));
        } else {
          j["type"] = "ftm";
          j["t"] = r.t;
          Json ms = Json::array();
          for (const FtmMeasurement& m : r.measurements) ms.push_back(Json::array({m.t1, m.t2, m.t3, m.t4}));
          j["measurements"] = std::move(ms);
        }
      },
      record);
  return j.dump();
}

LogRecord decode_record(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw LogError(fmt::format("parse error: {}", e.what()));
  }
  if (!j.is_object()) throw LogError("record is not an object");
  if (!j.contains("v") || j["v"] != kSensorLogVersion) throw LogError("unsupported record version");
  if (!j.contains("type") || !j["type"].is_string()) throw LogError("field 'type' missing");
  const std::string type = j["type"].get<std::string>();
  const double t = number(j, "t");

  if (type == "odom") return OdomRecord{t, {number(j, "x"), number(j, "y"), number(j, "theta")}};
  if (type == "lidar") {
    LidarRecord r{t, number(j, "angular_step"), number(j, "max_range"), {}};
    if (!j.contains("ranges") || !j["ranges"].is_array()) throw LogError("field 'ranges' missing");
    for (const Json& v : j["ranges"]) {
      if (v.is_null()) r.ranges.emplace_back();
      else if (v.is_number()) r.ranges.emplace_back(v.get<double>());
      else throw LogError("lidar range is neither number nor null");
    }
    return r;
  }
  if (type == "csi") {
    if (!j.contains("payload") || !j["payload"].is_string()) throw LogError("field 'payload' missing");
    std::vector<std::uint8_t> bytes;
    try {
      bytes = base64_decode(j["payload"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw LogError(e.what());
    }
    auto [h, stamp] = decode_csi_payload(bytes);
    if (h.rows() != static_cast<Eigen::Index>(number(j, "k")) || h.cols() != static_cast<Eigen::Index>(number(j, "j")))
      throw LogError("csi payload dimensions disagree with k/j fields");
    return CsiRecord{stamp, std::move(h)};
  }
  if (type == "ftm") {
    FtmRecord r{t, {}};
    if (!j.contains("measurements") || !j["measurements"].is_array()) throw LogError("field 'measurements' missing");
    for (const Json& m : j["measurements"]) {
      if (!m.is_array() || m.size() != 4) throw LogError("ftm measurement must be [t1, t2, t3, t4]");
      r.measurements.push_back({m[0].get<double>(), m[1].get<double>(), m[2].get<double>(), m[3].get<double>()});
    }
    return r;
  }
  throw LogError(fmt::format("unknown record type '{}'", type));
}

std::string encode_log(std::span<const LogRecord> records) {
  std::string out;
  for (const LogRecord& r : records) {
    out += encode_record(r);
    out += '\n';
  }
  return out;
}

std::vector<LogRecord> decode_log(const std::string& text, const std::string& source) {
  std::vector<LogRecord> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(decode_record(line));
    } catch (const LogError& e) {
      throw LogError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
    if (out.size() > 1 && !(record_time(out.back()) > record_time(out[out.size() - 2])))
      throw LogError(fmt::format("{}:{}: record time does not increase", source, line_no));
  }
  return out;
}

}  // namespace waveslam
