#include "waveslam/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace waveslam {

std::vector<EcdfRow> ecdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<EcdfRow> rows;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    rows.push_back({values[i], i + 1 == values.size() ? 1.0 : static_cast<double>(i + 1) / n});
  return rows;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: no samples");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-9));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<double> select_values(std::span<const ErrorSample> samples, const std::string& metric,
                                  const std::string& group) {
  std::vector<double> out;
  for (const ErrorSample& s : samples)
    if (s.metric == metric && s.group == group) out.push_back(s.value);
  return out;
}

std::vector<std::pair<std::string, std::string>> sample_groups(std::span<const ErrorSample> samples) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const ErrorSample& s : samples) {
    std::pair<std::string, std::string> key{s.metric, s.group};
    if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(std::move(key));
  }
  return out;
}

std::string encode_samples_csv(std::span<const ErrorSample> samples) {
  std::string out = "metric,group,value\n";
  for (const ErrorSample& s : samples) out += fmt::format("{},{},{}\n", s.metric, s.group, s.value);
  return out;
}

std::vector<ErrorSample> parse_samples_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<ErrorSample> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "metric,group,value") throw std::runtime_error(fmt::format("{}:1: unexpected header", source));
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2)
      throw std::runtime_error(fmt::format("{}:{}: expected metric,group,value", source, line_no));
    ErrorSample s{line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1), 0.0};
    try {
      std::size_t used = 0;
      const std::string v = line.substr(c2 + 1);
      s.value = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("{}:{}: bad value", source, line_no));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string encode_ecdf_csv(std::span<const ErrorSample> samples) {
  std::string out = "metric,group,value,fraction\n";
  for (const auto& [metric, group] : sample_groups(samples))
    for (const EcdfRow& r : ecdf(select_values(samples, metric, group)))
      out += fmt::format("{},{},{},{}\n", metric, group, r.value, r.fraction);
  return out;
}

std::string encode_summary_csv(std::span<const ErrorSample> samples) {
  std::string out = "metric,group,count,median,p80,max\n";
  for (const auto& [metric, group] : sample_groups(samples)) {
    const auto values = select_values(samples, metric, group);
    out += fmt::format("{},{},{},{},{},{}\n", metric, group, values.size(), percentile(values, 0.5),
                       percentile(values, 0.8), *std::max_element(values.begin(), values.end()));
  }
  return out;
}

}  // namespace waveslam
