#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "carigeo/landmarks.hpp"

namespace carigeo {

/// Coefficients of a landmark set in a PCA basis.
using ShapeVector = Eigen::VectorXd;

/// Linear shape model over landmarks normalized to [0, 1] (pixels / 256).
///
/// `components` holds one unit-norm basis vector per row, ordered by
/// decreasing variance. The sign of each row is fixed so that its
/// largest-magnitude loading is positive, which makes fits reproducible.
struct PcaModel {
  Eigen::VectorXd mean;        // 126
  Eigen::MatrixXd components;  // k x 126
  Eigen::VectorXd variances;   // k
  double total_variance = 0.0;

  Eigen::Index k() const { return components.rows(); }
};

namespace detail {

inline Eigen::MatrixXd normalized_sample_matrix(std::span<const LandmarkSet> samples) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), kShapeDim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = samples[i].flat(1.0 / kFrameSize).transpose();
  }
  return x;
}

struct Spectrum {
  Eigen::VectorXd mean;
  Eigen::VectorXd eigenvalues;   // descending, clamped at 0
  Eigen::MatrixXd eigenvectors;  // rows, sign-normalized
  double total_variance = 0.0;
};

inline Spectrum covariance_spectrum(std::span<const LandmarkSet> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::EmptyInput, "PCA needs at least two samples");
  const Eigen::MatrixXd x = normalized_sample_matrix(samples);
  Spectrum s;
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(samples.size() - 1);
  s.total_variance = cov.trace();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "covariance eigendecomposition did not converge");
  }
  const Eigen::Index n = cov.rows();
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;  // solver sorts ascending
    s.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[src]);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    s.eigenvectors.row(i) = v.transpose();
  }
  return s;
}

inline PcaModel truncate(const Spectrum& s, Eigen::Index k) {
  PcaModel m;
  m.mean = s.mean;
  m.components = s.eigenvectors.topRows(k);
  m.variances = s.eigenvalues.head(k);
  m.total_variance = s.total_variance;
  return m;
}

inline Eigen::Index max_components(std::size_t sample_count) {
  return std::min<Eigen::Index>(static_cast<Eigen::Index>(sample_count) - 1,
                                static_cast<Eigen::Index>(kShapeDim));
}

}  // namespace detail

/// Fits the top-k principal components of aligned landmark sets.
inline PcaModel fit_pca(std::span<const LandmarkSet> samples, Eigen::Index k) {
  if (samples.size() < 2) throw Error(ErrorKind::EmptyInput, "PCA needs at least two samples");
  if (k < 1 || k > detail::max_components(samples.size())) {
    throw Error(ErrorKind::InvalidParameter,
                "k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(detail::max_components(samples.size())) + "]");
  }
  return detail::truncate(detail::covariance_spectrum(samples), k);
}

/// Fits the smallest basis whose explained variance reaches `target_fraction`.
inline PcaModel fit_pca_to_fraction(std::span<const LandmarkSet> samples, double target_fraction,
                                    Eigen::Index max_k = static_cast<Eigen::Index>(kShapeDim)) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "target variance fraction must be in (0, 1]");
  }
  const auto s = detail::covariance_spectrum(samples);
  if (!(s.total_variance > 0.0)) {
    throw Error(ErrorKind::DegenerateGeometry, "all samples are identical");
  }
  const Eigen::Index limit = std::min(max_k, detail::max_components(samples.size()));
  double acc = 0.0;
  Eigen::Index k = 0;
  while (k < limit) {
    acc += s.eigenvalues[k];
    ++k;
    if (acc / s.total_variance >= target_fraction) break;
  }
  return detail::truncate(s, std::max<Eigen::Index>(k, 1));
}

inline ShapeVector project(const PcaModel& m, const LandmarkSet& l) {
  return m.components * (l.flat(1.0 / kFrameSize) - m.mean);
}

inline LandmarkSet reconstruct(const PcaModel& m, const ShapeVector& v) {
  if (v.size() != m.k()) {
    throw Error(ErrorKind::InvalidParameter, "shape vector has " + std::to_string(v.size()) +
                                                 " coefficients, model expects " +
                                                 std::to_string(m.k()));
  }
  const Eigen::VectorXd flat = m.mean + m.components.transpose() * v;
  return LandmarkSet::from_flat(flat, kFrameSize);
}

/// Mean shape of the model in landmark coordinates.
inline LandmarkSet mean_landmarks(const PcaModel& m) { return LandmarkSet::from_flat(m.mean, kFrameSize); }

inline double explained_variance_fraction(const PcaModel& m) {
  if (!(m.total_variance > 0.0)) {
    throw Error(ErrorKind::DegenerateGeometry, "total variance is zero");
  }
  return std::min(1.0, m.variances.sum() / m.total_variance);
}

/// max |C C^T - I|.
inline double orthonormality_error(const PcaModel& m) {
  const Eigen::MatrixXd gram = m.components * m.components.transpose();
  return (gram - Eigen::MatrixXd::Identity(m.k(), m.k())).cwiseAbs().maxCoeff();
}

}  // namespace carigeo
