#include "waveslam/aoa_estimator.hpp"

#include <algorithm>
#include <cmath>

namespace waveslam {

namespace {

struct Peak {
  double elevation = 0.0;
  double azimuth = 0.0;
  std::complex<double> correlation;
  double magnitude = -1.0;
};

std::vector<double> uniform_angles(double step) {
  const int n = static_cast<int>(std::floor(std::numbers::pi / step + 1e-9));
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = -std::numbers::pi / 2.0 + i * step;
  return out;
}

std::vector<double> window_angles(double centre, double half_width, double step) {
  const int m = static_cast<int>(std::lround(half_width / step));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * m + 1));
  for (int i = -m; i <= m; ++i) {
    const double a = centre + i * step;
    if (a >= -std::numbers::pi / 2.0 && a <= std::numbers::pi / 2.0) out.push_back(a);
  }
  return out;
}

class SineSpaceSearch {
 public:
  explicit SineSpaceSearch(const ArrayGeometry& geometry) : geometry_(geometry) {}

  // Stacks axis responses for a list of angles as matrix columns.
  CsiMatrix responses(int count, const std::vector<double>& angles) const {
    CsiMatrix m(count, static_cast<Eigen::Index>(angles.size()));
    for (std::size_t i = 0; i < angles.size(); ++i)
      m.col(static_cast<Eigen::Index>(i)) =
          axis_response<double>(count, geometry_.spacing_wavelengths, std::sin(angles[i]));
    return m;
  }

  // Maximises |<a(el, az), residual>| over the product grid. Scan order is
  // azimuth-major; the first (lowest-index) maximum wins.
  Peak search(const CsiMatrix& residual, const std::vector<double>& azimuths,
              const std::vector<double>& elevations) const {
    return search(residual, azimuths, responses(geometry_.k_elems, azimuths), elevations,
                  responses(geometry_.j_elems, elevations));
  }

  Peak search(const CsiMatrix& residual, const std::vector<double>& azimuths, const CsiMatrix& az_resp,
              const std::vector<double>& elevations, const CsiMatrix& el_resp) const {
    const CsiMatrix corr = az_resp.adjoint() * residual * el_resp.conjugate();
    Peak best;
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
      for (Eigen::Index j = 0; j < corr.cols(); ++j) {
        const double az = azimuths[static_cast<std::size_t>(i)];
        const double el = elevations[static_cast<std::size_t>(j)];
        if (!in_sine_space(el, az)) continue;
        const double mag = std::abs(corr(i, j));
        if (mag > best.magnitude) best = {el, az, corr(i, j), mag};
      }
    }
    return best;
  }

  CsiMatrix steering(double elevation, double azimuth) const {
    const double s = geometry_.spacing_wavelengths;
    return axis_response<double>(geometry_.k_elems, s, std::sin(azimuth)) *
           axis_response<double>(geometry_.j_elems, s, std::sin(elevation)).transpose();
  }

 private:
  ArrayGeometry geometry_;
};

}  // namespace

ExtractionTrace extract_paths_traced(const CsiSnapshot& csi, const EstimatorConfig& config) {
  config.validate();
  const ArrayGeometry& geometry = csi.geometry;
  geometry.validate();
  if (csi.h.rows() != geometry.k_elems || csi.h.cols() != geometry.j_elems)
    throw std::invalid_argument("extract_paths: CSI dimensions do not match geometry");

  ExtractionTrace trace;
  const double total = csi.h.squaredNorm();
  if (!(total > 0.0)) return trace;

  const SineSpaceSearch search(geometry);
  const double elements = static_cast<double>(geometry.element_count());
  const std::vector<double> coarse = uniform_angles(config.coarse_step);
  const CsiMatrix coarse_az = search.responses(geometry.k_elems, coarse);
  const CsiMatrix coarse_el = search.responses(geometry.j_elems, coarse);

  auto refine = [&](const CsiMatrix& residual, double el, double az) {
    return search.search(residual, window_angles(az, config.coarse_step, config.refine_step),
                         window_angles(el, config.coarse_step, config.refine_step));
  };

  std::vector<PathEstimate> paths;
  CsiMatrix residual = csi.h;
  while (static_cast<int>(paths.size()) < config.max_paths) {
    const Peak coarse_peak = search.search(residual, coarse, coarse_az, coarse, coarse_el);
    if (coarse_peak.magnitude <= 0.0) break;
    const Peak peak = refine(residual, coarse_peak.elevation, coarse_peak.azimuth);
    const std::complex<double> gain = peak.correlation / elements;
    residual -= gain * search.steering(peak.elevation, peak.azimuth);
    const double fraction = std::clamp(residual.squaredNorm() / total, 0.0, 1.0);
    paths.push_back({gain, peak.elevation, peak.azimuth, fraction});
    trace.extraction_residuals.push_back(fraction);
    if (fraction < config.residual_stop) break;
  }

  for (int round = 0; round < config.refine_rounds; ++round) {
    for (PathEstimate& p : paths) {
      residual += p.gain * search.steering(p.elevation, p.azimuth);
      const Peak peak = refine(residual, p.elevation, p.azimuth);
      p.gain = peak.correlation / elements;
      p.elevation = peak.elevation;
      p.azimuth = peak.azimuth;
      residual -= p.gain * search.steering(p.elevation, p.azimuth);
    }
    trace.refinement_residuals.push_back(std::clamp(residual.squaredNorm() / total, 0.0, 1.0));
  }

  std::stable_sort(paths.begin(), paths.end(), [](const PathEstimate& a, const PathEstimate& b) {
    return std::abs(a.gain) > std::abs(b.gain);
  });
  trace.paths = std::move(paths);
  return trace;
}

std::vector<PathEstimate> extract_paths(const CsiSnapshot& csi, const EstimatorConfig& config) {
  return extract_paths_traced(csi, config).paths;
}

PathEstimate strongest_path(std::span<const PathEstimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("strongest_path: empty estimate list");
  const PathEstimate* best = &estimates.front();
  for (const PathEstimate& e : estimates.subspan(1)) {
    const double mag = std::abs(e.gain);
    const double best_mag = std::abs(best->gain);
    if (mag > best_mag || (mag == best_mag && std::abs(e.azimuth) < std::abs(best->azimuth))) best = &e;
  }
  return *best;
}

}  // namespace waveslam
