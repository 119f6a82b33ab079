#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contourfit/algorithms.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/exec.hpp"
#include "contourfit/image.hpp"

namespace contourfit {

struct OtsuResult {
  int threshold = 0;
  BinaryImage foreground;  // pixels <= threshold
};

/// Maximizes the between-class variance of the 256-bin histogram; ties go
/// to the lowest threshold. Throws ConstantImage.
OtsuResult otsu_threshold(const GrayImage& img);

enum class MorphOp { dilate, erode };

struct MorphStep {
  MorphOp op;
  int radius;
};

struct MorphProgram {
  std::vector<MorphStep> steps;

  void validate() const;
  /// "erode:2,dilate:2"
  static MorphProgram parse(std::string_view text);
  std::string to_string() const;
};

/// Disk structuring element of the given radius. Outside the image counts as
/// background for dilation and foreground for erosion, so the two are exact
/// duals under complement.
BinaryImage dilate(const BinaryImage& in, int radius, Exec exec = Exec::parallel);
BinaryImage erode(const BinaryImage& in, int radius, Exec exec = Exec::parallel);
BinaryImage run_morph(const BinaryImage& in, const MorphProgram& prog, Exec exec = Exec::parallel);

struct Region {
  BinaryImage mask;
  Point2 centroid;
  std::size_t area = 0;
};

/// Keeps the 8-connected component whose centroid is nearest the image
/// center (ties: larger area). Throws NoForeground.
Region select_center_region_info(const BinaryImage& bin);
BinaryImage select_center_region(const BinaryImage& bin);

/// Gaussian smoothing, Sobel gradients, non-maximum suppression and
/// hysteresis with lo/hi given as fractions of the maximum gradient.
BinaryImage canny_edges(const GrayImage& img, double sigma = 2.0, double lo = 0.1,
                        double hi = 0.3, Exec exec = Exec::parallel);

/// Farthest edge pixel from `center` in each of `bins` angular sectors.
/// Throws NoEdges.
PointSet radial_outermost(const BinaryImage& edges, Point2 center, std::size_t bins = 360);

struct DropletConfig {
  MorphProgram morph{{{MorphOp::erode, 2}, {MorphOp::dilate, 2}}};
  double canny_sigma = 2.0;
  double canny_lo = 0.1;
  double canny_hi = 0.3;
  /// Region mask growth before it gates the Canny edges.
  int edge_margin = 3;
  std::size_t bins = 360;
  std::size_t n_conics = 2000;
  std::uint64_t seed = 1;
  FitParams fit;
};

struct DropletResult {
  Fit fit;
  double area = 0.0;
  double morph_area = 0.0;  // pixel count of the selected region
  Point2 center;            // region centroid
  PointSet points;
  EllipseCloud cloud;
};

struct DropletPoints {
  Region region;
  PointSet points;
};

/// otsu -> morphology -> center region -> Canny inside region -> radial outermost.
DropletPoints extract_droplet_points(const GrayImage& img, const DropletConfig& cfg,
                                     Exec exec = Exec::parallel);

/// otsu -> morphology -> center region -> Canny inside region -> radial
/// outermost -> ellipse cloud -> chosen fitter.
DropletResult analyze_droplet(const GrayImage& img, const DropletConfig& cfg, Algorithm algo,
                              Exec exec = Exec::parallel);

/// Runs the shared stages once and every requested fitter on the same cloud.
std::vector<DropletResult> analyze_droplet_all(const GrayImage& img, const DropletConfig& cfg,
                                               std::span<const Algorithm> algos,
                                               Exec exec = Exec::parallel);

}  // namespace contourfit
