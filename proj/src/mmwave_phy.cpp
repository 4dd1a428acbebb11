#include "waveslam/mmwave_phy.hpp"

namespace waveslam {

CsiSnapshot synthesize_csi(std::span<const RayPath> paths, const ArrayGeometry& geometry,
                           double noise_sigma, double elevation_jitter_sigma, Rng& rng) {
  geometry.validate();
  if (noise_sigma < 0.0 || elevation_jitter_sigma < 0.0)
    throw std::invalid_argument("synthesize_csi: negative noise parameter");

  CsiSnapshot snap;
  snap.geometry = geometry;
  snap.noise_sigma = noise_sigma;
  snap.h = CsiMatrix::Zero(geometry.k_elems, geometry.j_elems);

  for (const RayPath& p : paths) {
    const double elevation = p.elevation + gaussian(rng, elevation_jitter_sigma);
    if (!in_field_of_view(elevation, p.azimuth)) {
      ++snap.dropped_paths;
      continue;
    }
    snap.h += p.gain * steering_vector<double>(geometry, elevation, p.azimuth);
  }

  if (noise_sigma > 0.0) {
    const double per_axis = noise_sigma / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < snap.h.cols(); ++j)
      for (Eigen::Index k = 0; k < snap.h.rows(); ++k) {
        const double re = gaussian(rng, per_axis);
        const double im = gaussian(rng, per_axis);
        snap.h(k, j) += std::complex<double>(re, im);
      }
  }
  return snap;
}

}  // namespace waveslam
