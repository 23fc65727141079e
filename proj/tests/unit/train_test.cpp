#include <gtest/gtest.h>

#include "support.hpp"

using namespace carigeo;

namespace {

TrainConfig tiny_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.epochs = 1;
  cfg.generator_hidden = {8, 8};
  cfg.discriminator_hidden = {8};
  return cfg;
}

std::vector<ShapeVector> vectors(Rng& rng, int n, int k) {
  std::vector<ShapeVector> out;
  for (int i = 0; i < n; ++i) out.push_back(carigeo::test::random_vector(rng, k, 0.1));
  return out;
}

bool same_net(const DenseNet& a, const DenseNet& b) {
  if (a.dims() != b.dims()) return false;
  for (std::size_t p = 0; p < a.parameter_count(); ++p) {
    if (a.parameter(p) != b.parameter(p)) return false;
  }
  return true;
}

}  // namespace

TEST(Train, TinyRunIsFiniteAndReproducible) {
  Rng rng(1);
  const auto xs = vectors(rng, 2, 4), ys = vectors(rng, 2, 4);
  const TrainResult a = train(xs, ys, tiny_config(9));
  const TrainResult b = train(xs, ys, tiny_config(9));
  ASSERT_EQ(a.report.size(), 1u);
  const auto& e = a.report[0];
  for (double v : {e.adv_x, e.adv_y, e.cyc, e.cha_x, e.cha_y, e.total}) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(e.total, b.report[0].total);
  EXPECT_EQ(e.cyc, b.report[0].cyc);
  EXPECT_TRUE(same_net(a.model.g_xy, b.model.g_xy));
  EXPECT_TRUE(same_net(a.model.g_yx, b.model.g_yx));
  EXPECT_TRUE(same_net(a.model.d_x, b.model.d_x));
  EXPECT_TRUE(same_net(a.model.d_y, b.model.d_y));
  EXPECT_FALSE(same_net(a.model.g_xy, train(xs, ys, tiny_config(10)).model.g_xy));
}

TEST(Train, ReportTotalCombinesEpochMeans) {
  Rng rng(2);
  const auto xs = vectors(rng, 5, 3), ys = vectors(rng, 3, 3);
  TrainConfig cfg = tiny_config(3);
  cfg.epochs = 3;
  cfg.batch_size = 2;
  int calls = 0;
  const TrainResult r = train(xs, ys, cfg, [&](int epoch, const EpochLosses&) { EXPECT_EQ(epoch, calls++); });
  EXPECT_EQ(calls, 3);
  for (const auto& e : r.report) {
    EXPECT_NEAR(e.total, e.adv_x + e.adv_y + 10.0 * e.cyc + e.cha_x + e.cha_y, 1e-12);
  }
}

TEST(Train, StoresDomainMeans) {
  Rng rng(3);
  const auto xs = vectors(rng, 4, 3), ys = vectors(rng, 4, 3);
  const TrainResult r = train(xs, ys, tiny_config(1));
  ShapeVector mx = ShapeVector::Zero(3), my = ShapeVector::Zero(3);
  for (int i = 0; i < 4; ++i) {
    mx += xs[static_cast<std::size_t>(i)] / 4.0;
    my += ys[static_cast<std::size_t>(i)] / 4.0;
  }
  EXPECT_LT((r.model.mean_x - mx).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((r.model.mean_y - my).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NO_THROW(r.model.validate());
}

TEST(Train, EmptyDomainIsEmptyInput) {
  Rng rng(4);
  const auto xs = vectors(rng, 2, 3);
  const std::vector<ShapeVector> none;
  for (const auto& [p, c] : {std::pair{&xs, &none}, std::pair{&none, &xs}}) {
    try {
      train(*p, *c, tiny_config(0));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
  }
}

TEST(Train, InvalidConfigIsRejected) {
  Rng rng(5);
  const auto xs = vectors(rng, 2, 3);
  TrainConfig cfg = tiny_config(0);
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(xs, xs, cfg), Error);
  cfg = tiny_config(0);
  cfg.epochs = 0;
  EXPECT_THROW(train(xs, xs, cfg), Error);
  const std::vector<ShapeVector> mixed{ShapeVector::Zero(3), ShapeVector::Zero(4)};
  EXPECT_THROW(train(mixed, xs, tiny_config(0)), Error);
}

TEST(Train, DivergenceReportsEpoch) {
  Rng rng(6);
  std::vector<ShapeVector> xs, ys;
  for (int i = 0; i < 4; ++i) {
    xs.push_back(carigeo::test::random_vector(rng, 3, 1e150));
    ys.push_back(carigeo::test::random_vector(rng, 3, 1e150));
  }
  TrainConfig cfg = tiny_config(1);
  cfg.learning_rate = 1e150;
  cfg.epochs = 5;
  try {
    train(xs, ys, cfg);
    FAIL() << "training should diverge";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalFailure);
    EXPECT_GE(e.epoch(), 0);
    EXPECT_LT(e.epoch(), 5);
  }
}

TEST(ReplayBuffer, FillsThenSwaps) {
  ReplayBuffer pool(2, 5);
  const ShapeVector a = Eigen::Vector2d(1, 0), b = Eigen::Vector2d(2, 0), c = Eigen::Vector2d(3, 0);
  EXPECT_EQ(pool.query(a), a);
  EXPECT_EQ(pool.query(b), b);
  EXPECT_EQ(pool.size(), 2u);
  int swapped = 0;
  for (int i = 0; i < 200; ++i) {
    const ShapeVector out = pool.query(c);
    if (out != c) ++swapped;
  }
  EXPECT_GT(swapped, 0);
  EXPECT_LT(swapped, 200);
  ReplayBuffer off(0, 1);
  EXPECT_EQ(off.query(a), a);
  EXPECT_EQ(off.size(), 0u);
}
