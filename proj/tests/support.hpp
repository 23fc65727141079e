#pragma once

#include <vector>

#include "carigeo/carigeo.hpp"

namespace carigeo::test {

/// Template face with every coordinate perturbed by U(-spread, spread).
inline LandmarkSet random_landmarks(Rng& rng, double spread = 10.0) {
  const LandmarkSet base = face_template();
  std::array<Point, kLandmarkCount> p;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    p[i] = base[i] + Point(rng.uniform(-spread, spread), rng.uniform(-spread, spread));
  }
  return LandmarkSet(p);
}

inline AffineTransform random_affine(Rng& rng) {
  Eigen::Matrix2d a;
  a << rng.uniform(0.7, 1.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.7, 1.3);
  return AffineTransform(a, Point(rng.uniform(-20, 20), rng.uniform(-20, 20)));
}

inline ShapeVector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  ShapeVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

/// Single linear layer with weight = identity and zero bias.
inline DenseNet identity_net(int k) {
  DenseLayer l{Eigen::MatrixXd::Identity(k, k), Eigen::VectorXd::Zero(k)};
  return DenseNet::from_layers({l});
}

/// Single linear layer computing a * x + b elementwise.
inline DenseNet diagonal_net(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  DenseLayer l{a.asDiagonal().toDenseMatrix(), b};
  return DenseNet::from_layers({l});
}

/// Critic whose output is the constant `c` regardless of input.
inline DenseNet constant_critic(int k, double c) {
  DenseLayer l{Eigen::MatrixXd::Zero(1, k), Eigen::VectorXd::Constant(1, c)};
  return DenseNet::from_layers({l});
}

}  // namespace carigeo::test
