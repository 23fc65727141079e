#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "carigeo/landmarks.hpp"
#include "carigeo/shape_core.hpp"

namespace carigeo {

/// U(r) = r^2 log r^2, with U(0) = 0. Takes r^2.
inline double tps_kernel(double r2) { return r2 > 0.0 ? r2 * std::log(r2) : 0.0; }

/// Thin-plate spline f(p) = A p + t + sum_i w_i U(|p - c_i|).
struct TpsTransform {
  std::vector<Point> control;     // c_i
  Eigen::Matrix<double, 2, 3> affine;  // [t | A], columns: 1, x, y
  Eigen::MatrixX2d weights;       // w_i, one row per control point
  double lambda = 0.0;

  Point operator()(const Point& p) const {
    Point out = affine.col(0) + affine.col(1) * p.x() + affine.col(2) * p.y();
    for (std::size_t i = 0; i < control.size(); ++i) {
      const double u = tps_kernel((p - control[i]).squaredNorm());
      out.x() += weights(static_cast<Eigen::Index>(i), 0) * u;
      out.y() += weights(static_cast<Eigen::Index>(i), 1) * u;
    }
    return out;
  }

  /// Largest violation of sum w = 0, sum w x = 0, sum w y = 0.
  double side_condition_error() const {
    Eigen::Vector2d s0 = Eigen::Vector2d::Zero(), sx = s0, sy = s0;
    for (std::size_t i = 0; i < control.size(); ++i) {
      const Eigen::Vector2d w = weights.row(static_cast<Eigen::Index>(i)).transpose();
      s0 += w;
      sx += w * control[i].x();
      sy += w * control[i].y();
    }
    return std::max({s0.cwiseAbs().maxCoeff(), sx.cwiseAbs().maxCoeff(), sy.cwiseAbs().maxCoeff()});
  }
};

inline Point eval_tps(const TpsTransform& t, const Point& p) { return t(p); }

/// Fits the spline taking `src[i]` to `dst[i]`. With lambda = 0 the spline
/// interpolates; lambda > 0 adds lambda * I to the kernel block (smoothing).
inline TpsTransform fit_tps(std::span<const Point> src, std::span<const Point> dst, double lambda) {
  if (src.size() != dst.size()) throw Error(ErrorKind::InvalidParameter, "tps: point counts differ");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidParameter, "tps: lambda must be >= 0");
  const auto n = static_cast<Eigen::Index>(src.size());
  if (n < 3) throw Error(ErrorKind::DegenerateGeometry, "tps needs at least three control points");

  // Non-collinearity: some triple must span a triangle.
  double best_area = 0.0;
  for (Eigen::Index i = 2; i < n; ++i) {
    best_area = std::max(best_area, triangle_area(src[0], src[1], src[static_cast<std::size_t>(i)]));
  }
  if (!(best_area > kMinAnchorArea)) {
    // src[0] and src[1] may coincide; fall back to the full search.
    for (Eigen::Index i = 0; i < n && !(best_area > kMinAnchorArea); ++i) {
      for (Eigen::Index j = i + 1; j < n && !(best_area > kMinAnchorArea); ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
          best_area = std::max(best_area, triangle_area(src[static_cast<std::size_t>(i)], src[static_cast<std::size_t>(j)],
                                                        src[static_cast<std::size_t>(k)]));
        }
      }
    }
  }
  if (!(best_area > kMinAnchorArea)) throw Error(ErrorKind::DegenerateGeometry, "tps control points are collinear");
  if (lambda == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if ((src[static_cast<std::size_t>(i)] - src[static_cast<std::size_t>(j)]).squaredNorm() < 1e-18) {
          throw Error(ErrorKind::DegenerateGeometry, "duplicated tps control points; use lambda > 0");
        }
      }
    }
  }

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(n + 3, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& ci = src[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      system(i, j) = tps_kernel((ci - src[static_cast<std::size_t>(j)]).squaredNorm());
    }
    system(i, i) += lambda;
    system(i, n) = system(n, i) = 1.0;
    system(i, n + 1) = system(n + 1, i) = ci.x();
    system(i, n + 2) = system(n + 2, i) = ci.y();
    rhs.row(i) = dst[static_cast<std::size_t>(i)].transpose();
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw Error(ErrorKind::DegenerateGeometry, "tps system is singular");
  const Eigen::MatrixX2d sol = lu.solve(rhs);
  if (!sol.allFinite()) throw Error(ErrorKind::NumericalFailure, "tps solve produced non-finite values");

  TpsTransform t;
  t.control.assign(src.begin(), src.end());
  t.weights = sol.topRows(n);
  t.affine = sol.bottomRows(3).transpose();
  t.lambda = lambda;
  return t;
}

inline TpsTransform fit_tps(const LandmarkSet& src, const LandmarkSet& dst, double lambda) {
  return fit_tps(std::span<const Point>(src.points()), std::span<const Point>(dst.points()), lambda);
}

}  // namespace carigeo
