#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carigeo/adam.hpp"
#include "carigeo/dense_net.hpp"
#include "carigeo/error.hpp"
#include "carigeo/pca.hpp"

namespace carigeo {

struct TrainConfig {
  double lambda_cyc = 10.0;
  double lambda_cha = 1.0;
  double learning_rate = 0.0002;
  int batch_size = 1;
  int epochs = 200;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int replay_buffer_size = 50;  // 0 disables the fake pool
  bool linear_decay = false;    // hold lr for the first half, then decay linearly to 0
  std::vector<int> generator_hidden{256, 256, 256};
  std::vector<int> discriminator_hidden{256, 256};

  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); };
    if (!(lambda_cyc >= 0.0) || !(lambda_cha >= 0.0)) fail("loss weights must be >= 0");
    if (!(learning_rate > 0.0)) fail("learning rate must be > 0");
    if (epochs < 1) fail("epochs must be >= 1");
    if (batch_size < 1) fail("batch size must be >= 1");
    if (replay_buffer_size < 0) fail("replay buffer size must be >= 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
      fail("adam betas must be in [0, 1)");
    }
    if (!(adam_eps > 0.0)) fail("adam eps must be > 0");
    for (int w : generator_hidden) {
      if (w < 1) fail("hidden widths must be positive");
    }
    for (int w : discriminator_hidden) {
      if (w < 1) fail("hidden widths must be positive");
    }
  }
};

/// Geometry translator: two generators over PCA shape vectors
/// (photo -> caricature and back), one discriminator per domain, and the
/// frozen per-domain means used by the characteristic loss.
struct GeoGanModel {
  DenseNet g_xy;  // photo -> caricature
  DenseNet g_yx;  // caricature -> photo
  DenseNet d_x;   // photo-domain critic
  DenseNet d_y;   // caricature-domain critic
  ShapeVector mean_x;
  ShapeVector mean_y;

  int k() const { return static_cast<int>(mean_x.size()); }

  /// Throws unless every network matches the shape-vector dimension.
  void validate() const {
    const int n = k();
    auto bad = [](const char* what) { throw Error(ErrorKind::InvalidParameter, what); };
    if (n < 1 || mean_y.size() != n) bad("domain means must share a positive dimension");
    for (const DenseNet* g : {&g_xy, &g_yx}) {
      if (g->dims().empty() || g->input_dim() != n || g->output_dim() != n) bad("generator dims must be k -> k");
    }
    for (const DenseNet* d : {&d_x, &d_y}) {
      if (d->dims().empty() || d->input_dim() != n || d->output_dim() != 1) bad("discriminator dims must be k -> 1");
    }
    if (!mean_x.allFinite() || !mean_y.allFinite()) bad("domain means must be finite");
  }
};

/// Randomly initialized model; streams are drawn in the order g_xy, g_yx, d_x, d_y.
inline GeoGanModel init_model(int k, const TrainConfig& cfg, Rng& rng) {
  GeoGanModel m;
  m.g_xy = DenseNet::random(mlp_dims(k, cfg.generator_hidden, k), rng);
  m.g_yx = DenseNet::random(mlp_dims(k, cfg.generator_hidden, k), rng);
  m.d_x = DenseNet::random(mlp_dims(k, cfg.discriminator_hidden, 1), rng);
  m.d_y = DenseNet::random(mlp_dims(k, cfg.discriminator_hidden, 1), rng);
  m.mean_x = ShapeVector::Zero(k);
  m.mean_y = ShapeVector::Zero(k);
  return m;
}

}  // namespace carigeo
