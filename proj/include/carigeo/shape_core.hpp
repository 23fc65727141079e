#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "carigeo/landmarks.hpp"

namespace carigeo {

inline constexpr double kMinAnchorArea = 1e-6;

/// Unsigned area of the triangle (a, b, c), px^2.
inline double triangle_area(const Point& a, const Point& b, const Point& c) {
  const Point u = b - a;
  const Point v = c - a;
  return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

/// Eye centers and mouth center used to register a face to the mean face.
struct AnchorTriple {
  Point left_eye_center = Point::Zero();
  Point right_eye_center = Point::Zero();
  Point mouth_center = Point::Zero();

  std::array<Point, 3> as_array() const { return {left_eye_center, right_eye_center, mouth_center}; }

  double area() const { return triangle_area(left_eye_center, right_eye_center, mouth_center); }

  bool degenerate() const { return !(area() > kMinAnchorArea); }
};

class AffineTransform {
 public:
  AffineTransform() : linear_(Eigen::Matrix2d::Identity()), translation_(Point::Zero()) {}

  AffineTransform(const Eigen::Matrix2d& linear, const Point& translation)
      : linear_(linear), translation_(translation) {
    if (!linear_.allFinite() || !translation_.allFinite()) {
      throw Error(ErrorKind::NumericalFailure, "affine transform has non-finite entries");
    }
    if (linear_.determinant() == 0.0) {
      throw Error(ErrorKind::DegenerateGeometry, "affine transform is singular");
    }
  }

  static AffineTransform identity() { return {}; }

  const Eigen::Matrix2d& linear() const { return linear_; }
  const Point& translation() const { return translation_; }

  Point operator()(const Point& p) const { return linear_ * p + translation_; }

  AffineTransform inverse() const {
    const Eigen::Matrix2d inv = linear_.inverse();
    return AffineTransform(inv, -(inv * translation_));
  }

  /// (this * other)(p) == this(other(p)).
  AffineTransform operator*(const AffineTransform& other) const {
    return AffineTransform(linear_ * other.linear_, linear_ * other.translation_ + translation_);
  }

 private:
  Eigen::Matrix2d linear_;
  Point translation_;
};

inline LandmarkSet apply_affine(const AffineTransform& t, const LandmarkSet& l) {
  std::array<Point, kLandmarkCount> out;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) out[i] = t(l[i]);
  return LandmarkSet(out);
}

inline AnchorTriple anchor_points(const LandmarkSet& l) {
  AnchorTriple a{l.centroid(layout::kLeftEye), l.centroid(layout::kRightEye),
                 l.centroid(layout::kMouth)};
  if (a.degenerate()) {
    throw Error(ErrorKind::DegenerateGeometry, "eye and mouth centers are collinear");
  }
  return a;
}

/// The unique affine map taking three source points onto three targets.
inline AffineTransform affine_from_triples(const AnchorTriple& src, const AnchorTriple& dst) {
  if (src.degenerate() || dst.degenerate()) {
    throw Error(ErrorKind::DegenerateGeometry, "anchor triangle is degenerate");
  }
  // Work relative to the first anchor so the 2x2 solve stays well conditioned.
  Eigen::Matrix2d s;
  s.col(0) = src.right_eye_center - src.left_eye_center;
  s.col(1) = src.mouth_center - src.left_eye_center;
  Eigen::Matrix2d d;
  d.col(0) = dst.right_eye_center - dst.left_eye_center;
  d.col(1) = dst.mouth_center - dst.left_eye_center;
  const Eigen::Matrix2d linear = d * s.inverse();
  const Point translation = dst.left_eye_center - linear * src.left_eye_center;
  return AffineTransform(linear, translation);
}

/// Registers `l` to the mean face by mapping its anchors onto `target`.
/// Returns the aligned set together with the transform that produced it.
inline std::pair<LandmarkSet, AffineTransform> align_to_mean(const LandmarkSet& l,
                                                             const AnchorTriple& target) {
  const AffineTransform t = affine_from_triples(anchor_points(l), target);
  return {apply_affine(t, l), t};
}

inline LandmarkSet mean_shape(std::span<const LandmarkSet> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "mean_shape needs at least one sample");
  std::array<Point, kLandmarkCount> sum;
  sum.fill(Point::Zero());
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < kLandmarkCount; ++i) sum[i] += s[i];
  }
  const double n = static_cast<double>(samples.size());
  for (auto& p : sum) p /= n;
  return LandmarkSet(sum);
}

/// Per-point l_x + alpha * (l_y - l_x), alpha in [0, 2]. Both endpoints are
/// returned exactly.
inline LandmarkSet interpolate_landmarks(const LandmarkSet& lx, const LandmarkSet& ly, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw Error(ErrorKind::InvalidParameter, "alpha must be in [0, 2], got " + std::to_string(alpha));
  }
  if (alpha == 0.0) return lx;
  if (alpha == 1.0) return ly;
  std::array<Point, kLandmarkCount> out;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) out[i] = lx[i] + alpha * (ly[i] - lx[i]);
  return LandmarkSet(out);
}

}  // namespace carigeo
