#include <gtest/gtest.h>

#include "support.hpp"

using namespace carigeo;

TEST(DenseNet, ZeroNetGivesZeroOutput) {
  const DenseNet net({4, 6, 3});
  Rng rng(1);
  const auto y = net.forward(carigeo::test::random_vector(rng, 4));
  EXPECT_EQ(y.size(), 3);
  EXPECT_TRUE((y.array() == 0.0).all());
}

TEST(DenseNet, IdentityLayerPassesInputThrough) {
  Rng rng(2);
  const auto x = carigeo::test::random_vector(rng, 5);
  const auto y = carigeo::test::identity_net(5).forward(x);
  EXPECT_TRUE((y.array() == x.array()).all());
}

TEST(DenseNet, MatchesHandRolledTwoLayerOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseNet net = DenseNet::random({5, 7, 4}, rng);
    DenseNet biased = net;
    for (auto& l : biased.layers()) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = rng.uniform(-0.5, 0.5);
    }
    const auto x = carigeo::test::random_vector(rng, 5);
    const auto& l0 = biased.layers()[0];
    const auto& l1 = biased.layers()[1];
    std::vector<double> h(7);
    for (int r = 0; r < 7; ++r) {
      double s = l0.bias[r];
      for (int c = 0; c < 5; ++c) s += l0.weight(r, c) * x[c];
      h[static_cast<std::size_t>(r)] = s > 0.0 ? s : 0.0;
    }
    const auto y = biased.forward(x);
    for (int r = 0; r < 4; ++r) {
      double s = l1.bias[r];
      for (int c = 0; c < 7; ++c) s += l1.weight(r, c) * h[static_cast<std::size_t>(c)];
      EXPECT_NEAR(y[r], s, 1e-12);
    }
  }
}

TEST(DenseNet, TapeForwardMatchesValueForward) {
  Rng rng(4);
  const DenseNet net = DenseNet::random({3, 8, 8, 3}, rng);
  const auto x = carigeo::test::random_vector(rng, 3);
  ad::Tape t;
  const auto v = net.forward(t, t.constant(x));
  EXPECT_TRUE((t.value(v).array() == net.forward(x).array()).all());
}

TEST(DenseNet, DimensionMismatchIsRejected) {
  const DenseNet net({4, 2});
  try {
    net.forward(Eigen::VectorXd::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
  EXPECT_THROW(DenseNet({4}), Error);
  EXPECT_THROW(DenseNet({4, 0, 2}), Error);
  EXPECT_THROW(DenseNet::from_layers({{Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(2)},
                                      {Eigen::MatrixXd::Zero(1, 3), Eigen::VectorXd::Zero(1)}}),
               Error);
}

TEST(DenseNet, RandomInitWithinFanInBound) {
  Rng rng(5);
  const DenseNet net = DenseNet::random({16, 64, 4}, rng);
  for (const auto& l : net.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    EXPECT_LE(l.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_TRUE((l.bias.array() == 0.0).all());
  }
  Rng again(5);
  const DenseNet twin = DenseNet::random({16, 64, 4}, again);
  for (std::size_t p = 0; p < net.parameter_count(); ++p) EXPECT_EQ(net.parameter(p), twin.parameter(p));
}

TEST(DenseNet, ParameterViewCoversEveryEntry) {
  DenseNet net({3, 4, 2});
  EXPECT_EQ(net.parameter_count(), 3u * 4 + 4 + 4 * 2 + 2);
  for (std::size_t p = 0; p < net.parameter_count(); ++p) net.parameter(p) = static_cast<double>(p + 1);
  double sum = 0.0;
  for (const auto& l : net.layers()) sum += l.weight.sum() + l.bias.sum();
  const double n = static_cast<double>(net.parameter_count());
  EXPECT_EQ(sum, n * (n + 1) / 2);
  EXPECT_THROW(net.parameter(net.parameter_count()), Error);
}
