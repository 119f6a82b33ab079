#include "contourfit/algorithms.hpp"

#include "contourfit/error.hpp"
#include "contourfit/synth.hpp"

namespace contourfit {

std::string_view label(Algorithm a) {
  switch (a) {
    case Algorithm::ols: return "ols";
    case Algorithm::ransac: return "ransac";
    case Algorithm::rht: return "rht";
    case Algorithm::rosin: return "rosin";
    case Algorithm::median_contour: return "median-contour";
    case Algorithm::mode_contour: return "mode-contour";
  }
  return "?";
}

std::string algorithm_labels() {
  std::string out;
  for (auto a : kAllAlgorithms) {
    if (!out.empty()) out += ", ";
    out += label(a);
  }
  return out;
}

Algorithm parse_algorithm(std::string_view text) {
  for (auto a : kAllAlgorithms) {
    if (label(a) == text) return a;
  }
  throw Error(ErrorCode::UnknownAlgorithm,
              "unknown algorithm '" + std::string(text) + "' (valid: " + algorithm_labels() + ")");
}

Fit run_fitter(Algorithm algo, const PointSet& ps, const EllipseCloud& cloud,
               const FitParams& params, Exec exec) {
  switch (algo) {
    case Algorithm::ols: {
      Ellipse init;
      if (params.ols_init) {
        init = *params.ols_init;
      } else {
        EllipseCloud head;
        const std::size_t m = std::min(params.ols_init_members, cloud.size());
        head.ellipses.assign(cloud.ellipses.begin(), cloud.ellipses.begin() + static_cast<std::ptrdiff_t>(m));
        init = fit_rosin_median(head);
      }
      return fit_ols(ps.points, init).ellipse;
    }
    case Algorithm::ransac: return fit_ransac(ps.points, cloud, params.ransac, exec).ellipse;
    case Algorithm::rht: return fit_rht(cloud, params.rht, exec);
    case Algorithm::rosin: return fit_rosin_median(cloud);
    case Algorithm::median_contour: return fit_median_contour(cloud, params.rays, exec);
    case Algorithm::mode_contour: return fit_mode_contour(cloud, params.rays, params.kde, exec);
  }
  throw Error(ErrorCode::UnknownAlgorithm, "unhandled algorithm");
}

double fit_area(const Fit& fit) {
  if (const auto* e = std::get_if<Ellipse>(&fit)) return e->area();
  return contour_area(std::get<PolarContour>(fit));
}

double fit_curve_error(const Fit& fit, const Ellipse& truth) {
  return std::visit([&truth](const auto& f) { return curve_error(f, truth); }, fit);
}

PolarContour fit_to_contour(const Fit& fit, std::size_t rays) {
  if (const auto* e = std::get_if<Ellipse>(&fit)) return ellipse_to_contour(*e, rays);
  return std::get<PolarContour>(fit);
}

}  // namespace contourfit
