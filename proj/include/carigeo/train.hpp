#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "carigeo/adam.hpp"
#include "carigeo/losses.hpp"
#include "carigeo/model.hpp"
#include "carigeo/rng.hpp"

namespace carigeo {

/// Per-epoch means of the objective terms. Adversarial columns hold the
/// critic-side values measured during the discriminator update.
struct EpochLosses {
  double adv_x = 0.0;
  double adv_y = 0.0;
  double cyc = 0.0;
  double cha_x = 0.0;
  double cha_y = 0.0;
  double total = 0.0;
};

struct TrainResult {
  GeoGanModel model;
  std::vector<EpochLosses> report;
};

/// Pool of previously generated fakes for critic updates.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {}

  /// Returns the sample to show the critic. Until the pool is full the input
  /// is stored and returned; afterwards, with probability 1/2 a stored sample
  /// is returned and replaced by the input.
  ShapeVector query(const ShapeVector& fake) {
    if (capacity_ == 0) return fake;
    if (pool_.size() < capacity_) {
      pool_.push_back(fake);
      return fake;
    }
    if (rng_.uniform() < 0.5) {
      const std::size_t i = rng_.index(capacity_);
      ShapeVector old = std::move(pool_[i]);
      pool_[i] = fake;
      return old;
    }
    return fake;
  }

  std::size_t size() const { return pool_.size(); }

 private:
  std::size_t capacity_;
  Rng rng_;
  std::vector<ShapeVector> pool_;
};

inline ShapeVector mean_vector(std::span<const ShapeVector> v) {
  if (v.empty()) throw Error(ErrorKind::EmptyInput, "mean of an empty set");
  ShapeVector sum = ShapeVector::Zero(v.front().size());
  for (const auto& x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

/// Called after every epoch with the 0-based epoch index and its losses.
using EpochCallback = std::function<void(int, const EpochLosses&)>;

/// Trains the geometry translator on unpaired photo and caricature shape
/// vectors. Each iteration draws one batch from each (independently
/// shuffled) domain, updates both generators on the generator-form
/// objective, then updates both critics on pooled fakes. An epoch runs
/// ceil(max(|photos|, |caris|) / batch) iterations. Fully determined by
/// `cfg` (including the seed) and the data.
inline TrainResult train(std::span<const ShapeVector> photos, std::span<const ShapeVector> caris,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (photos.empty() || caris.empty()) throw Error(ErrorKind::EmptyInput, "both domains need samples");
  const auto k = photos.front().size();
  for (auto set : {photos, caris}) {
    for (const auto& v : set) {
      if (v.size() != k) throw Error(ErrorKind::InvalidParameter, "shape vectors differ in dimension");
      if (!v.allFinite()) throw Error(ErrorKind::InvalidParameter, "shape vectors must be finite");
    }
  }

  Rng init_rng(mix64(cfg.seed, 1));
  Rng order_rng(mix64(cfg.seed, 2));
  TrainResult result;
  GeoGanModel& m = result.model;
  m = init_model(static_cast<int>(k), cfg, init_rng);
  m.mean_x = mean_vector(photos);
  m.mean_y = mean_vector(caris);

  AdamState s_gxy(m.g_xy), s_gyx(m.g_yx), s_dx(m.d_x), s_dy(m.d_y);
  DenseNet gr_gxy = m.g_xy.zeros_like(), gr_gyx = m.g_yx.zeros_like();
  DenseNet gr_dx = m.d_x.zeros_like(), gr_dy = m.d_y.zeros_like();
  ReplayBuffer pool_x(static_cast<std::size_t>(cfg.replay_buffer_size), mix64(cfg.seed, 3));
  ReplayBuffer pool_y(static_cast<std::size_t>(cfg.replay_buffer_size), mix64(cfg.seed, 4));
  const LossWeights weights{cfg.lambda_cyc, cfg.lambda_cha};

  std::vector<std::size_t> order_x(photos.size()), order_y(caris.size());
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t per_epoch = std::max(photos.size(), caris.size());
  const std::size_t iterations = (per_epoch + batch - 1) / batch;

  std::vector<ShapeVector> bx, by, fx, fy;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    AdamConfig adam = cfg.adam();
    if (cfg.linear_decay) {
      const int hold = cfg.epochs / 2;
      if (epoch >= hold) {
        adam.learning_rate *= 1.0 - static_cast<double>(epoch - hold) / static_cast<double>(cfg.epochs - hold);
      }
    }
    std::iota(order_x.begin(), order_x.end(), 0);
    std::iota(order_y.begin(), order_y.end(), 0);
    order_rng.shuffle(order_x.begin(), order_x.end());
    order_rng.shuffle(order_y.begin(), order_y.end());

    EpochLosses sum;
    try {
      for (std::size_t it = 0; it < iterations; ++it) {
        bx.clear();
        by.clear();
        const std::size_t first = it * batch;
        const std::size_t last = std::min(first + batch, per_epoch);
        for (std::size_t i = first; i < last; ++i) {
          bx.push_back(photos[order_x[i % photos.size()]]);
          by.push_back(caris[order_y[i % caris.size()]]);
        }

        // Generators.
        gr_gxy.set_zero();
        gr_gyx.set_zero();
        ad::Tape tg;
        const auto nodes =
            record_objective(tg, m, {&gr_gxy, &gr_gyx, nullptr, nullptr}, bx, by, weights, AdversarialForm::Generator);
        tg.backward(nodes.total);
        adam_step(m.g_xy, gr_gxy, s_gxy, adam);
        adam_step(m.g_yx, gr_gyx, s_gyx, adam);

        // Critics, on fakes produced before the generator update.
        fx.clear();
        fy.clear();
        for (std::size_t i = 0; i < bx.size(); ++i) {
          fx.push_back(pool_x.query(tg.value(nodes.fake_x[i])));
          fy.push_back(pool_y.query(tg.value(nodes.fake_y[i])));
        }
        gr_dx.set_zero();
        gr_dy.set_zero();
        ad::Tape td;
        const ad::Var dx = record_critic_loss(td, m.d_x, &gr_dx, bx, fx);
        const ad::Var dy = record_critic_loss(td, m.d_y, &gr_dy, by, fy);
        td.backward(td.weighted_sum({{1.0, dx}, {1.0, dy}}));
        adam_step(m.d_x, gr_dx, s_dx, adam);
        adam_step(m.d_y, gr_dy, s_dy, adam);

        sum.adv_x += td.scalar_value(dx);
        sum.adv_y += td.scalar_value(dy);
        sum.cyc += tg.scalar_value(nodes.cyc);
        sum.cha_x += tg.scalar_value(nodes.cha_x);
        sum.cha_y += tg.scalar_value(nodes.cha_y);
      }
    } catch (const DivergenceError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericalFailure) throw;
      throw DivergenceError(epoch, e.what());
    }

    const double n = static_cast<double>(iterations);
    EpochLosses mean{sum.adv_x / n, sum.adv_y / n, sum.cyc / n, sum.cha_x / n, sum.cha_y / n, 0.0};
    mean.total = mean.adv_x + mean.adv_y + cfg.lambda_cyc * mean.cyc + cfg.lambda_cha * (mean.cha_x + mean.cha_y);
    if (!std::isfinite(mean.total)) throw DivergenceError(epoch, "epoch loss is not finite");
    for (const DenseNet* net : {&m.g_xy, &m.g_yx, &m.d_x, &m.d_y}) {
      if (!net->all_finite()) throw DivergenceError(epoch, "network parameters are not finite");
    }
    result.report.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

}  // namespace carigeo
