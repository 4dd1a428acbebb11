#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "waveslam/geometry.hpp"
#include "waveslam/raytrace.hpp"

namespace waveslam {

// K×J uniform rectangular array in the X = 0 plane; rows (k) run along Y and
// carry the azimuth phase, columns (j) run along Z and carry elevation.
struct ArrayGeometry {
  int k_elems = 6;
  int j_elems = 6;
  double spacing_wavelengths = 0.5;
  double carrier_hz = kDefaultCarrierHz;

  void validate() const {
    if (k_elems < 2 || j_elems < 2) throw std::invalid_argument("ArrayGeometry: need at least 2x2 elements");
    if (!(spacing_wavelengths > 0.0 && spacing_wavelengths <= 1.0))
      throw std::invalid_argument("ArrayGeometry: spacing must be in (0, 1] wavelengths");
  }
  int element_count() const { return k_elems * j_elems; }
  bool operator==(const ArrayGeometry&) const = default;
};

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using CsiMatrix = ComplexMatrix<double>;

// True when (elevation, azimuth) maps to a point inside the unit sine-space disc.
inline bool in_sine_space(double elevation, double azimuth) {
  const double se = std::sin(elevation);
  const double sa = std::sin(azimuth);
  return se * se + sa * sa <= 1.0 + 1e-12;
}

// Phase progression exp(i·2π·spacing·c·sine) along one array axis, with the
// element index c centred on the array midpoint.
template <typename Scalar>
ComplexVector<Scalar> axis_response(int count, Scalar spacing_wavelengths, Scalar sine) {
  ComplexVector<Scalar> v(count);
  const Scalar centre = Scalar(count - 1) / Scalar(2);
  for (int c = 0; c < count; ++c) {
    const Scalar phase = Scalar(2) * std::numbers::pi_v<Scalar> * spacing_wavelengths * (Scalar(c) - centre) * sine;
    v(c) = std::polar(Scalar(1), phase);
  }
  return v;
}

// Array response a(α, β): element (k, j) = exp(i·2π·d·(k·sin β + j·sin α)).
template <typename Scalar = double>
ComplexMatrix<Scalar> steering_vector(const ArrayGeometry& geometry, Scalar elevation, Scalar azimuth) {
  geometry.validate();
  if (!in_sine_space(double(elevation), double(azimuth)))
    throw std::domain_error("steering_vector: angles outside sine space");
  const Scalar spacing = Scalar(geometry.spacing_wavelengths);
  const ComplexVector<Scalar> rows = axis_response<Scalar>(geometry.k_elems, spacing, std::sin(azimuth));
  const ComplexVector<Scalar> cols = axis_response<Scalar>(geometry.j_elems, spacing, std::sin(elevation));
  return rows * cols.transpose();
}

// Paths from behind the array plane, or along it (endfire, where a
// half-wavelength array cannot tell +90° from −90°), are not received.
inline bool in_field_of_view(double elevation, double azimuth) {
  return std::abs(azimuth) < std::numbers::pi / 2.0 - 1e-9 && in_sine_space(elevation, azimuth);
}
inline bool in_field_of_view(const RayPath& path) { return in_field_of_view(path.elevation, path.azimuth); }

// Strongest receivable path of a gain-sorted list; the FTM waveform locks onto it.
inline const RayPath* dominant_path(std::span<const RayPath> sorted_paths) {
  for (const RayPath& p : sorted_paths)
    if (in_field_of_view(p)) return &p;
  return nullptr;
}

struct CsiSnapshot {
  CsiMatrix h;
  double noise_sigma = 0.0;
  ArrayGeometry geometry;
  int dropped_paths = 0;  // outside the ±90° field of view
};

// H = Σ γ_p·a(α_p + jitter_p, β_p) + W. W is circular complex Gaussian with
// E|w|² = noise_sigma² per element. Draw order: one jitter per input path,
// then W in column-major element order.
CsiSnapshot synthesize_csi(std::span<const RayPath> paths, const ArrayGeometry& geometry,
                           double noise_sigma, double elevation_jitter_sigma, Rng& rng);

}  // namespace waveslam
