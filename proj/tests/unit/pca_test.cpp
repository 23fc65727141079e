#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"

using namespace carigeo;
using carigeo::test::brute_covariance;
using carigeo::test::jacobi_eigenvalues;
using carigeo::test::low_rank_samples;
using carigeo::test::random_landmarks;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Io;
}

}  // namespace

TEST(JacobiOracle, KnownSpectrum) {
  const auto ev = jacobi_eigenvalues({{2, 1, 0}, {1, 2, 0}, {0, 0, 5}});
  EXPECT_NEAR(ev[0], 5.0, 1e-14);
  EXPECT_NEAR(ev[1], 3.0, 1e-14);
  EXPECT_NEAR(ev[2], 1.0, 1e-14);
}

TEST(FitPca, RankTwoDataIsFullyExplained) {
  Rng rng(1);
  const auto s = low_rank_samples(rng, 2, 30);
  const PcaModel m = fit_pca(s, 2);
  EXPECT_NEAR(explained_variance_fraction(m), 1.0, 1e-10);
}

TEST(FitPca, SymmetricPairGivesDirectionOfDifference) {
  Rng rng(2);
  const Eigen::VectorXd mid = face_template().flat();
  const Eigen::VectorXd d = carigeo::test::random_vector(rng, kShapeDim, 2.0);
  const std::vector<LandmarkSet> s{LandmarkSet::from_flat(mid + d), LandmarkSet::from_flat(mid - d)};
  const PcaModel m = fit_pca(s, 1);
  const Eigen::VectorXd c = m.components.row(0).transpose();
  const double cosine = c.dot(d) / d.norm();
  EXPECT_NEAR(std::abs(cosine), 1.0, 1e-12);
  Eigen::Index arg = 0;
  c.cwiseAbs().maxCoeff(&arg);
  EXPECT_GT(c[arg], 0.0);
  EXPECT_NEAR(cosine, d[arg] > 0 ? 1.0 : -1.0, 1e-12);
}

TEST(FitPca, VariancesMatchJacobiOracle) {
  Rng rng(3);
  std::vector<LandmarkSet> s;
  for (int i = 0; i < 50; ++i) s.push_back(random_landmarks(rng, 8.0));
  const PcaModel m = fit_pca(s, 49);
  const auto ev = jacobi_eigenvalues(brute_covariance(s));
  for (Eigen::Index i = 0; i < m.k(); ++i) EXPECT_NEAR(m.variances[i], ev[static_cast<std::size_t>(i)], 1e-8) << i;
  double trace = 0.0;
  for (double e : ev) trace += e;
  EXPECT_NEAR(m.total_variance, trace, 1e-10);
  EXPECT_NEAR(explained_variance_fraction(m), 1.0, 1e-10);
}

TEST(FitPca, StructuralInvariants) {
  Rng rng(4);
  std::vector<LandmarkSet> s;
  for (int i = 0; i < 40; ++i) s.push_back(random_landmarks(rng));
  const PcaModel m = fit_pca(s, 20);
  EXPECT_LT(orthonormality_error(m), 1e-8);
  for (Eigen::Index i = 0; i < m.k(); ++i) {
    EXPECT_GE(m.variances[i], 0.0);
    if (i > 0) {
      EXPECT_LE(m.variances[i], m.variances[i - 1]);
    }
    Eigen::Index arg = 0;
    m.components.row(i).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(m.components(i, arg), 0.0);
  }
  double prev = 0.0;
  for (Eigen::Index k = 1; k <= 39; k += 2) {
    const double f = explained_variance_fraction(fit_pca(s, k));
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(FitPca, Deterministic) {
  Rng rng(5);
  std::vector<LandmarkSet> s;
  for (int i = 0; i < 30; ++i) s.push_back(random_landmarks(rng));
  const PcaModel a = fit_pca(s, 10), b = fit_pca(s, 10);
  EXPECT_TRUE((a.components.array() == b.components.array()).all());
  EXPECT_TRUE((a.mean.array() == b.mean.array()).all());
  EXPECT_TRUE((a.variances.array() == b.variances.array()).all());
}

TEST(FitPca, Errors) {
  Rng rng(6);
  std::vector<LandmarkSet> s{random_landmarks(rng)};
  EXPECT_EQ(kind_of([&] { fit_pca(s, 1); }), ErrorKind::EmptyInput);
  s.push_back(random_landmarks(rng));
  s.push_back(random_landmarks(rng));
  EXPECT_EQ(kind_of([&] { fit_pca(s, 3); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { fit_pca(s, 0); }), ErrorKind::InvalidParameter);
  const std::vector<LandmarkSet> same(4, face_template());
  const PcaModel flat = fit_pca(same, 1);
  EXPECT_EQ(kind_of([&] { explained_variance_fraction(flat); }), ErrorKind::DegenerateGeometry);
}

TEST(FitPca, EqualEigenvaluesGiveHalf) {
  const Eigen::VectorXd base = face_template().flat();
  Eigen::VectorXd d1 = Eigen::VectorXd::Zero(kShapeDim), d2 = Eigen::VectorXd::Zero(kShapeDim);
  d1[0] = 4.0;
  d2[7] = 4.0;
  const std::vector<LandmarkSet> s{LandmarkSet::from_flat(base + d1), LandmarkSet::from_flat(base - d1),
                                   LandmarkSet::from_flat(base + d2), LandmarkSet::from_flat(base - d2)};
  EXPECT_NEAR(explained_variance_fraction(fit_pca(s, 1)), 0.5, 1e-10);
  EXPECT_NEAR(explained_variance_fraction(fit_pca(s, 3)), 1.0, 1e-10);
}

TEST(FitPca, FractionModePicksSmallestK) {
  Rng rng(7);
  std::vector<LandmarkSet> s;
  for (int i = 0; i < 40; ++i) s.push_back(random_landmarks(rng));
  const PcaModel full = fit_pca(s, 39);
  const PcaModel m = fit_pca_to_fraction(s, 0.9);
  const double total = full.total_variance;
  EXPECT_GE(m.variances.sum() / total, 0.9);
  EXPECT_LT(full.variances.head(m.k() - 1).sum() / total, 0.9);
  EXPECT_LE(fit_pca_to_fraction(s, 0.9, 3).k(), 3);
}

TEST(Project, MeanMapsToZero) {
  Rng rng(8);
  const auto s = low_rank_samples(rng, 4, 20);
  const PcaModel m = fit_pca(s, 4);
  EXPECT_LT(project(m, reconstruct(m, ShapeVector::Zero(4))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(max_point_distance(reconstruct(m, ShapeVector::Zero(4)), mean_landmarks(m)), 1e-12);
}

TEST(Project, FirstComponentGivesUnitVector) {
  Rng rng(9);
  const auto s = low_rank_samples(rng, 4, 20);
  const PcaModel m = fit_pca(s, 4);
  const Eigen::VectorXd flat = m.mean + m.components.row(0).transpose();
  const ShapeVector v = project(m, LandmarkSet::from_flat(flat, 256.0));
  ShapeVector e = ShapeVector::Zero(4);
  e[0] = 1.0;
  EXPECT_LT((v - e).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Project, MatchesDotProductOracle) {
  Rng rng(10);
  const auto s = low_rank_samples(rng, 5, 20);
  const PcaModel m = fit_pca(s, 5);
  const LandmarkSet l = random_landmarks(rng);
  const ShapeVector v = project(m, l);
  for (Eigen::Index r = 0; r < m.k(); ++r) {
    double dot = 0.0;
    for (std::size_t p = 0; p < kLandmarkCount; ++p) {
      dot += m.components(r, 2 * p) * (l[p].x() / 256.0 - m.mean[2 * p]);
      dot += m.components(r, 2 * p + 1) * (l[p].y() / 256.0 - m.mean[2 * p + 1]);
    }
    EXPECT_NEAR(v[r], dot, 1e-12);
  }
}

TEST(Reconstruct, MatchesExpansionOracle) {
  Rng rng(11);
  const auto s = low_rank_samples(rng, 5, 20);
  const PcaModel m = fit_pca(s, 5);
  const ShapeVector v = carigeo::test::random_vector(rng, 5, 0.1);
  const LandmarkSet l = reconstruct(m, v);
  for (std::size_t p = 0; p < kLandmarkCount; ++p) {
    double x = m.mean[2 * p], y = m.mean[2 * p + 1];
    for (Eigen::Index r = 0; r < 5; ++r) {
      x += m.components(r, 2 * p) * v[r];
      y += m.components(r, 2 * p + 1) * v[r];
    }
    EXPECT_NEAR(l[p].x(), 256.0 * x, 1e-10);
    EXPECT_NEAR(l[p].y(), 256.0 * y, 1e-10);
  }
  EXPECT_THROW(reconstruct(m, ShapeVector::Zero(3)), Error);
}

TEST(Reconstruct, IdentityOnFittedSpan) {
  Rng rng(12);
  const auto s = low_rank_samples(rng, 5, 40);
  const PcaModel m = fit_pca(s, 5);
  for (const auto& l : s) EXPECT_LE(max_point_distance(reconstruct(m, project(m, l)), l), 1e-6);
}
