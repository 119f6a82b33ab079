#pragma once

#include <cstdint>
#include <vector>

#include "contourfit/contour.hpp"
#include "contourfit/geometry.hpp"
#include "contourfit/image.hpp"

namespace contourfit {

/// Straight dark band across the image (a suspension wire).
struct Stripe {
  Point2 through;
  double angle = 0.0;
  double width = 3.0;
};

/// Dark star-shaped blob on a light background:
/// R(t) = ellipse_radius(t) * (1 + lobe_amplitude * cos(lobes * t + lobe_phase)).
struct BlobSpec {
  int width = 256;
  int height = 256;
  Ellipse shape{128.0, 128.0, 60.0, 40.0, 0.0};
  int lobes = 0;
  double lobe_amplitude = 0.0;
  double lobe_phase = 0.0;
  std::vector<Stripe> stripes;
  std::uint8_t foreground = 50;
  std::uint8_t background = 200;
  double noise_sigma = 2.0;
  int supersample = 4;
  std::uint64_t seed = 1;

  /// Boundary radius about shape.center() along direction t.
  double radius(double t) const;
  /// Exact polar-integral area of the blob.
  double area() const;
  PolarContour truth_contour(std::size_t rays = kDefaultRays) const;
};

/// Area-weighted (supersampled) rendering plus seeded Gaussian pixel noise.
GrayImage render_blob(const BlobSpec& spec);

/// Droplet-like test sequence: the first half plain ellipses, the second half
/// lobed blobs crossed by a dark stripe. Shapes vary smoothly with the index.
std::vector<BlobSpec> synthetic_sequence(std::size_t count, std::uint64_t seed);

}  // namespace contourfit
