#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace carigeo;
using carigeo::test::random_affine;
using carigeo::test::random_landmarks;

namespace {

std::array<Point, kLandmarkCount> points_of(const LandmarkSet& l) { return l.points(); }

Point brute_mean(const LandmarkSet& l, std::size_t first, std::size_t count) {
  double x = 0.0, y = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    x += l[i].x();
    y += l[i].y();
  }
  return Point(x / count, y / count);
}

}  // namespace

TEST(Layout, PartitionCoversAllPoints) {
  std::size_t next = 0, total = 0;
  for (const auto& g : layout::kGroups) {
    EXPECT_EQ(g.first, next);
    next = g.end();
    total += g.count;
  }
  EXPECT_EQ(total, 63u);
  EXPECT_EQ(layout::kContour.count, 33u);
  EXPECT_EQ(layout::kLeftBrow.count + layout::kRightBrow.count, 8u);
  EXPECT_EQ(layout::kLeftEye.count + layout::kRightEye.count, 12u);
  EXPECT_EQ(layout::kNose.count, 4u);
  EXPECT_EQ(layout::kMouth.count, 6u);
}

TEST(LandmarkSet, RejectsNonFinite) {
  auto p = points_of(face_template());
  p[5].x() = std::nan("");
  EXPECT_THROW(LandmarkSet{p}, Error);
  EXPECT_THROW(LandmarkSet::from_flat(Eigen::VectorXd::Zero(10)), Error);
}

TEST(LandmarkSet, FlatRoundTrip) {
  Rng rng(1);
  const LandmarkSet l = random_landmarks(rng);
  EXPECT_EQ(LandmarkSet::from_flat(l.flat()), l);
  const Eigen::VectorXd f = l.flat();
  EXPECT_EQ(f[0], l[0].x());
  EXPECT_EQ(f[1], l[0].y());
  EXPECT_EQ(f[125], l[62].y());
}

TEST(AnchorPoints, IdenticalGroupPoints) {
  auto p = points_of(face_template());
  for (std::size_t i = layout::kLeftEye.first; i < layout::kLeftEye.end(); ++i) p[i] = Point(100, 120);
  const AnchorTriple a = anchor_points(LandmarkSet(p));
  EXPECT_EQ(a.left_eye_center, Point(100, 120));
}

TEST(AnchorPoints, SymmetricEyesGiveSymmetricCenters) {
  auto p = points_of(face_template());
  for (std::size_t j = 0; j < 6; ++j) {
    const Point q(90.0 + 3.0 * j, 110.0 + (j % 3));
    p[layout::kLeftEye.first + j] = q;
    p[layout::kRightEye.first + j] = Point(256.0 - q.x(), q.y());
  }
  const AnchorTriple a = anchor_points(LandmarkSet(p));
  EXPECT_NEAR(a.left_eye_center.x() + a.right_eye_center.x(), 256.0, 1e-12);
  EXPECT_NEAR(a.left_eye_center.y(), a.right_eye_center.y(), 1e-12);
}

TEST(AnchorPoints, MatchBruteForceAverages) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const LandmarkSet l = random_landmarks(rng, 15.0);
    const AnchorTriple a = anchor_points(l);
    EXPECT_LT((a.left_eye_center - brute_mean(l, 41, 6)).norm(), 1e-12);
    EXPECT_LT((a.right_eye_center - brute_mean(l, 47, 6)).norm(), 1e-12);
    EXPECT_LT((a.mouth_center - brute_mean(l, 57, 6)).norm(), 1e-12);
  }
}

TEST(AnchorPoints, CollinearIsDegenerate) {
  auto p = points_of(face_template());
  for (std::size_t i = layout::kLeftEye.first; i < layout::kLeftEye.end(); ++i) p[i] = Point(100, 100);
  for (std::size_t i = layout::kRightEye.first; i < layout::kRightEye.end(); ++i) p[i] = Point(150, 100);
  for (std::size_t i = layout::kMouth.first; i < layout::kMouth.end(); ++i) p[i] = Point(200, 100);
  try {
    anchor_points(LandmarkSet(p));
    FAIL() << "expected a degenerate-geometry error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGeometry);
  }
}

TEST(AnchorPoints, CommuteWithAffineMaps) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const LandmarkSet l = random_landmarks(rng);
    const AffineTransform m = random_affine(rng);
    const AnchorTriple moved = anchor_points(apply_affine(m, l));
    const AnchorTriple a = anchor_points(l);
    EXPECT_LT((moved.left_eye_center - m(a.left_eye_center)).norm(), 1e-9);
    EXPECT_LT((moved.right_eye_center - m(a.right_eye_center)).norm(), 1e-9);
    EXPECT_LT((moved.mouth_center - m(a.mouth_center)).norm(), 1e-9);
  }
}

TEST(MeanShape, SingleSampleIsItself) {
  Rng rng(4);
  const std::vector<LandmarkSet> one{random_landmarks(rng)};
  EXPECT_EQ(mean_shape(one), one[0]);
}

TEST(MeanShape, SymmetricPairGivesCenter) {
  Rng rng(5);
  const LandmarkSet m = random_landmarks(rng);
  std::array<Point, kLandmarkCount> plus, minus;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const Point d(rng.uniform(-4, 4), rng.uniform(-4, 4));
    plus[i] = m[i] + d;
    minus[i] = m[i] - d;
  }
  const std::vector<LandmarkSet> pair{LandmarkSet(plus), LandmarkSet(minus)};
  EXPECT_LT(max_point_distance(mean_shape(pair), m), 1e-12);
}

TEST(MeanShape, MatchesSummationOracleAndIsPermutationInvariant) {
  Rng rng(6);
  std::vector<LandmarkSet> s;
  for (int i = 0; i < 5; ++i) s.push_back(random_landmarks(rng));
  const LandmarkSet m = mean_shape(s);
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    double x = 0.0, y = 0.0;
    for (const auto& l : s) {
      x += l[i].x();
      y += l[i].y();
    }
    EXPECT_NEAR(m[i].x(), x / 5.0, 1e-12);
    EXPECT_NEAR(m[i].y(), y / 5.0, 1e-12);
  }
  std::reverse(s.begin(), s.end());
  EXPECT_LT(max_point_distance(mean_shape(s), m), 1e-12);
}

TEST(MeanShape, EmptyInput) {
  try {
    mean_shape(std::vector<LandmarkSet>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(AlignToMean, AlreadyAlignedIsIdentity) {
  Rng rng(7);
  const LandmarkSet l = random_landmarks(rng);
  const auto [aligned, t] = align_to_mean(l, anchor_points(l));
  EXPECT_LT((t.linear() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(t.translation().norm(), 1e-10);
  EXPECT_LT(max_point_distance(aligned, l), 1e-10);
}

TEST(AlignToMean, PureTranslation) {
  Rng rng(8);
  const LandmarkSet target = random_landmarks(rng);
  const LandmarkSet moved = apply_affine(AffineTransform(Eigen::Matrix2d::Identity(), Point(5, -3)), target);
  const auto [aligned, t] = align_to_mean(moved, anchor_points(target));
  EXPECT_LT((t.translation() - Point(-5, 3)).norm(), 1e-10);
  EXPECT_LT((t.linear() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(max_point_distance(aligned, target), 1e-10);
}

TEST(AlignToMean, RecoversInverseOfRandomAffine) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const LandmarkSet base = random_landmarks(rng);
    const AffineTransform a = random_affine(rng);
    const AnchorTriple target = anchor_points(base);
    const auto [aligned, t] = align_to_mean(apply_affine(a, base), target);
    const AffineTransform inv = a.inverse();
    for (const Point& p : target.as_array()) {
      EXPECT_LT((t(a(p)) - p).norm(), 1e-9);
      EXPECT_LT((t(p) - inv(p)).norm(), 1e-9);
    }
    const AnchorTriple got = anchor_points(aligned);
    EXPECT_LT((got.left_eye_center - target.left_eye_center).norm(), 1e-9);
    EXPECT_LT((got.right_eye_center - target.right_eye_center).norm(), 1e-9);
    EXPECT_LT((got.mouth_center - target.mouth_center).norm(), 1e-9);
  }
}

TEST(ApplyAffine, IdentityAndInverse) {
  Rng rng(10);
  const LandmarkSet l = random_landmarks(rng);
  EXPECT_EQ(apply_affine(AffineTransform::identity(), l), l);
  const AffineTransform t = random_affine(rng);
  EXPECT_LT(max_point_distance(apply_affine(t.inverse(), apply_affine(t, l)), l), 1e-9);
}

TEST(ApplyAffine, MatchesDirectMultiply) {
  Rng rng(11);
  const LandmarkSet l = random_landmarks(rng);
  const AffineTransform t = random_affine(rng);
  const LandmarkSet out = apply_affine(t, l);
  const auto& a = t.linear();
  const auto& b = t.translation();
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const double x = a(0, 0) * l[i].x() + a(0, 1) * l[i].y() + b.x();
    const double y = a(1, 0) * l[i].x() + a(1, 1) * l[i].y() + b.y();
    EXPECT_NEAR(out[i].x(), x, 1e-12);
    EXPECT_NEAR(out[i].y(), y, 1e-12);
  }
}

TEST(ApplyAffine, SingularTransformRejected) {
  Eigen::Matrix2d s;
  s << 1, 2, 2, 4;
  EXPECT_THROW(AffineTransform(s, Point::Zero()), Error);
}

TEST(Interpolate, Endpoints) {
  Rng rng(12);
  const LandmarkSet a = random_landmarks(rng), b = random_landmarks(rng);
  EXPECT_EQ(interpolate_landmarks(a, b, 0.0), a);
  EXPECT_EQ(interpolate_landmarks(a, b, 1.0), b);
}

TEST(Interpolate, HalfwayPoint) {
  auto pa = points_of(face_template());
  auto pb = pa;
  pa[0] = Point(0, 0);
  pb[0] = Point(10, 20);
  const LandmarkSet mid = interpolate_landmarks(LandmarkSet(pa), LandmarkSet(pb), 0.5);
  EXPECT_EQ(mid[0], Point(5, 10));
}

TEST(Interpolate, AlphaOutOfRange) {
  const LandmarkSet a = face_template();
  for (double alpha : {-0.1, 2.1, std::nan("")}) {
    try {
      interpolate_landmarks(a, a, alpha);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
    }
  }
}
