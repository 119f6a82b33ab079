#pragma once

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>

#include "contourfit/cloud.hpp"
#include "contourfit/contour.hpp"
#include "contourfit/error.hpp"
#include "contourfit/geometry.hpp"

namespace test {

inline contourfit::EllipseCloud cloud_of(std::initializer_list<contourfit::Ellipse> es) {
  contourfit::EllipseCloud c;
  for (const auto& e : es) {
    c.ellipses.push_back(e);
    c.conics.push_back(contourfit::ellipse_to_conic(e));
    c.quintuples.push_back({0, 1, 2, 3, 4});
  }
  c.attempted = c.size();
  return c;
}

inline contourfit::EllipseCloud repeat(const contourfit::Ellipse& e, std::size_t n) {
  contourfit::EllipseCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.ellipses.push_back(e);
    c.conics.push_back(contourfit::ellipse_to_conic(e));
    c.quintuples.push_back({0, 1, 2, 3, 4});
  }
  c.attempted = n;
  return c;
}

inline void append(contourfit::EllipseCloud& c, const contourfit::EllipseCloud& more) {
  c.ellipses.insert(c.ellipses.end(), more.ellipses.begin(), more.ellipses.end());
  c.conics.insert(c.conics.end(), more.conics.begin(), more.conics.end());
  c.quintuples.insert(c.quintuples.end(), more.quintuples.begin(), more.quintuples.end());
  c.attempted += more.attempted;
}

inline contourfit::PolarContour constant(double r, std::size_t rays = 360, contourfit::Point2 center = {}) {
  return {center, std::vector<double>(rays, r)};
}

/// Code of the contourfit::Error thrown by f, if any.
inline std::optional<contourfit::ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const contourfit::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("contourfit_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace test
