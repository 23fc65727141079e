#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carigeo/error.hpp"

namespace carigeo {

inline constexpr std::size_t kLandmarkCount = 63;
inline constexpr std::size_t kShapeDim = 2 * kLandmarkCount;
inline constexpr double kFrameSize = 256.0;

using Point = Eigen::Vector2d;

/// Index ranges of the 63-point face layout. Groups are contiguous and
/// listed in storage order; their sizes sum to 63.
namespace layout {

struct Group {
  const char* name;
  std::size_t first;
  std::size_t count;

  constexpr std::size_t end() const { return first + count; }
};

inline constexpr Group kContour{"contour", 0, 33};
inline constexpr Group kLeftBrow{"left_brow", 33, 4};
inline constexpr Group kRightBrow{"right_brow", 37, 4};
inline constexpr Group kLeftEye{"left_eye", 41, 6};
inline constexpr Group kRightEye{"right_eye", 47, 6};
inline constexpr Group kNose{"nose", 53, 4};
inline constexpr Group kMouth{"mouth", 57, 6};

inline constexpr std::array<Group, 7> kGroups{kContour, kLeftBrow, kRightBrow, kLeftEye,
                                              kRightEye, kNose,     kMouth};

static_assert(kMouth.end() == kLandmarkCount);

}  // namespace layout

/// 63 facial landmarks in pixel coordinates of a 256x256 frame.
class LandmarkSet {
 public:
  LandmarkSet() { points_.fill(Point::Zero()); }

  explicit LandmarkSet(const std::array<Point, kLandmarkCount>& points) : points_(points) {
    validate();
  }

  explicit LandmarkSet(std::span<const Point> points) {
    if (points.size() != kLandmarkCount) {
      throw Error(ErrorKind::InvalidParameter,
                  "expected 63 landmarks, got " + std::to_string(points.size()));
    }
    std::copy(points.begin(), points.end(), points_.begin());
    validate();
  }

  /// Builds from the interleaved layout (x0, y0, x1, y1, ...), scaled by `scale`.
  static LandmarkSet from_flat(const Eigen::Ref<const Eigen::VectorXd>& flat, double scale = 1.0) {
    if (flat.size() != static_cast<Eigen::Index>(kShapeDim)) {
      throw Error(ErrorKind::InvalidParameter,
                  "flat landmark vector must have 126 entries, got " + std::to_string(flat.size()));
    }
    LandmarkSet out;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      out.points_[i] = Point(flat[2 * i], flat[2 * i + 1]) * scale;
    }
    out.validate();
    return out;
  }

  Eigen::VectorXd flat(double scale = 1.0) const {
    Eigen::VectorXd v(kShapeDim);
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      v[2 * i] = points_[i].x() * scale;
      v[2 * i + 1] = points_[i].y() * scale;
    }
    return v;
  }

  const Point& operator[](std::size_t i) const { return points_[i]; }
  const std::array<Point, kLandmarkCount>& points() const { return points_; }
  static constexpr std::size_t size() { return kLandmarkCount; }

  /// Mean of the points in one layout group.
  Point centroid(const layout::Group& g) const {
    Point sum = Point::Zero();
    for (std::size_t i = g.first; i < g.end(); ++i) sum += points_[i];
    return sum / static_cast<double>(g.count);
  }

  friend bool operator==(const LandmarkSet& a, const LandmarkSet& b) {
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      if (a.points_[i] != b.points_[i]) return false;
    }
    return true;
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      if (!points_[i].allFinite()) {
        throw Error(ErrorKind::InvalidParameter, "landmark " + std::to_string(i) + " is not finite");
      }
    }
  }

  std::array<Point, kLandmarkCount> points_;
};

/// Largest per-point Euclidean distance between two sets.
inline double max_point_distance(const LandmarkSet& a, const LandmarkSet& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) worst = std::max(worst, (a[i] - b[i]).norm());
  return worst;
}

/// Mean per-point Euclidean distance between two sets.
inline double mean_point_distance(const LandmarkSet& a, const LandmarkSet& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) sum += (a[i] - b[i]).norm();
  return sum / static_cast<double>(kLandmarkCount);
}

/// Frobenius distance between two sets viewed as 126-d vectors.
inline double shape_distance(const LandmarkSet& a, const LandmarkSet& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) sum += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sum);
}

}  // namespace carigeo
