#pragma once

#include <filesystem>
#include <string>

#include "contourfit/bench.hpp"
#include "contourfit/cloud.hpp"
#include "contourfit/contour.hpp"
#include "contourfit/geometry.hpp"

namespace contourfit::io {

// All CSV output: header row, LF line endings, 17 significant digits for
// geometry and 12 for derived statistics.

/// "x,y,label"; points without labels are written as inlier.
void write_points_csv(const std::filesystem::path& path, const PointSet& ps);
/// Accepts "x,y,label" or "x,y".
PointSet read_points_csv(const std::filesystem::path& path);

/// "# center,<cx>,<cy>" then "theta,radius" rows.
void write_contour_csv(const std::filesystem::path& path, const PolarContour& c);
PolarContour read_contour_csv(const std::filesystem::path& path);

/// {"cx":..,"cy":..,"major":..,"minor":..,"angle":..}
std::string ellipse_record(const Ellipse& e);
void write_ellipse_record(const std::filesystem::path& path, const Ellipse& e);
Ellipse read_ellipse_record(const std::filesystem::path& path);

/// One row per (run, algorithm) cell.
void write_results_csv(const std::filesystem::path& path, const std::vector<BenchResult>& results);
/// One row per case, one median-error column per algorithm.
void write_summary_csv(const std::filesystem::path& path, const std::vector<BenchResult>& results);
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& t);

std::string format_geom(double v);
std::string format_stat(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace contourfit::io
