#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "waveslam/mmwave_phy.hpp"

namespace waveslam {

struct PathEstimate {
  std::complex<double> gain;
  double elevation = 0.0;
  double azimuth = 0.0;
  double residual_power_after = 1.0;  // residual/total power right after this path was extracted
};

struct EstimatorConfig {
  double coarse_step = deg2rad(1.0);
  double refine_step = deg2rad(0.1);
  int max_paths = 5;
  double residual_stop = 0.01;
  int refine_rounds = 3;

  void validate() const {
    if (!(refine_step > 0.0 && refine_step < coarse_step))
      throw std::invalid_argument("EstimatorConfig: need 0 < refine_step < coarse_step");
    if (max_paths < 1) throw std::invalid_argument("EstimatorConfig: max_paths must be >= 1");
    if (refine_rounds < 0) throw std::invalid_argument("EstimatorConfig: refine_rounds must be >= 0");
  }
};

struct ExtractionTrace {
  std::vector<PathEstimate> paths;           // sorted by descending |gain|
  std::vector<double> extraction_residuals;  // fraction after each greedy extraction
  std::vector<double> refinement_residuals;  // fraction after each cancellation round
};

// Iterative matched-filter path extraction with successive cancellation:
// coarse sine-space grid search, local refinement, subtraction, repeated
// until the residual fraction drops below residual_stop or max_paths is
// reached; then refine_rounds of add-back / re-search / subtract. An all-zero
// snapshot yields an empty list.
std::vector<PathEstimate> extract_paths(const CsiSnapshot& csi, const EstimatorConfig& config = {});
ExtractionTrace extract_paths_traced(const CsiSnapshot& csi, const EstimatorConfig& config = {});

// argmax |gain|; ties go to the smaller |azimuth|.
PathEstimate strongest_path(std::span<const PathEstimate> estimates);

}  // namespace waveslam
