#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace waveslam {

// One error observation, labelled by metric and experiment group
// (e.g. metric "distance_error_m", group "d=3").
struct ErrorSample {
  std::string metric;
  std::string group;
  double value = 0.0;

  bool operator==(const ErrorSample&) const = default;
};

struct EcdfRow {
  double value = 0.0;
  double fraction = 0.0;
};

// Empirical CDF of the samples: sorted values against i/n, ending at 1.0.
std::vector<EcdfRow> ecdf(std::vector<double> values);

// Nearest-rank percentile, q in (0, 1]: sorted[ceil(q·n) − 1].
double percentile(std::vector<double> values, double q);

// Samples selected by metric and group, in input order.
std::vector<double> select_values(std::span<const ErrorSample> samples, const std::string& metric,
                                  const std::string& group);

// (metric, group) pairs in first-appearance order.
std::vector<std::pair<std::string, std::string>> sample_groups(std::span<const ErrorSample> samples);

std::string encode_samples_csv(std::span<const ErrorSample> samples);
std::vector<ErrorSample> parse_samples_csv(const std::string& text, const std::string& source = "<samples>");

// metric,group,value,fraction for every group.
std::string encode_ecdf_csv(std::span<const ErrorSample> samples);
// metric,group,count,median,p80,max for every group.
std::string encode_summary_csv(std::span<const ErrorSample> samples);

}  // namespace waveslam
