#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "carigeo/dense_net.hpp"
#include "carigeo/error.hpp"

namespace carigeo {

struct AdamConfig {
  double learning_rate = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment accumulators mirroring one network.
struct AdamState {
  DenseNet m;
  DenseNet v;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(const DenseNet& like) : m(like.zeros_like()), v(like.zeros_like()) {}
};

namespace detail {

template <typename P, typename G, typename M, typename V>
void adam_kernel(P&& p, const G& g, M&& m, V&& v, double lr_t, const AdamConfig& cfg, double bc2_sqrt) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.square();
  p -= lr_t * m / (v.sqrt() / bc2_sqrt + cfg.eps);
}

}  // namespace detail

/// One bias-corrected Adam update over a flat parameter block. `step` is the
/// 1-based index of this update.
inline void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                        std::span<double> v, std::int64_t step, const AdamConfig& cfg) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw Error(ErrorKind::InvalidParameter, "adam: parameter and state sizes differ");
  }
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::Map<const Eigen::ArrayXd> g(grads.data(), n);
  if (!g.allFinite()) throw Error(ErrorKind::NumericalFailure, "adam: non-finite gradient");
  const double t = static_cast<double>(step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  detail::adam_kernel(Eigen::Map<Eigen::ArrayXd>(params.data(), n), g, Eigen::Map<Eigen::ArrayXd>(m.data(), n),
                      Eigen::Map<Eigen::ArrayXd>(v.data(), n), cfg.learning_rate / bc1, cfg,
                      std::sqrt(bc2));
}

/// Applies one Adam update to every parameter of `net`.
inline void adam_step(DenseNet& net, const DenseNet& grad, AdamState& state, const AdamConfig& cfg) {
  if (grad.dims() != net.dims() || state.m.dims() != net.dims()) {
    throw Error(ErrorKind::InvalidParameter, "adam: gradient shape does not match network");
  }
  for (const auto& l : grad.layers()) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) {
      throw Error(ErrorKind::NumericalFailure, "adam: non-finite gradient");
    }
  }
  ++state.step;
  auto span_of = [](auto& x) { return std::span<double>(x.data(), static_cast<std::size_t>(x.size())); };
  auto cspan_of = [](const auto& x) {
    return std::span<const double>(x.data(), static_cast<std::size_t>(x.size()));
  };
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    auto& p = net.layers()[i];
    const auto& g = grad.layers()[i];
    auto& m = state.m.layers()[i];
    auto& v = state.v.layers()[i];
    adam_update(span_of(p.weight), cspan_of(g.weight), span_of(m.weight), span_of(v.weight), state.step, cfg);
    adam_update(span_of(p.bias), cspan_of(g.bias), span_of(m.bias), span_of(v.bias), state.step, cfg);
  }
}

}  // namespace carigeo
