#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carigeo/autodiff.hpp"
#include "carigeo/error.hpp"
#include "carigeo/rng.hpp"

namespace carigeo {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Fully connected network: affine + rectifier on every hidden layer,
/// affine (linear) output.
class DenseNet {
 public:
  DenseNet() = default;

  /// Zero-initialized network with layer widths `dims` (input first, output last).
  explicit DenseNet(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw Error(ErrorKind::InvalidParameter, "a network needs at least two widths");
    for (int d : dims_) {
      if (d < 1) throw Error(ErrorKind::InvalidParameter, "layer widths must be positive");
    }
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
      layers_.push_back({Eigen::MatrixXd::Zero(dims_[i + 1], dims_[i]), Eigen::VectorXd::Zero(dims_[i + 1])});
    }
  }

  /// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero. Weights are
  /// drawn layer by layer in row-major order.
  static DenseNet random(std::vector<int> dims, Rng& rng) {
    DenseNet net(std::move(dims));
    for (auto& layer : net.layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
      }
    }
    return net;
  }

  /// Rebuilds a network from explicit layers; widths must chain.
  static DenseNet from_layers(std::vector<DenseLayer> layers) {
    if (layers.empty()) throw Error(ErrorKind::InvalidParameter, "a network needs at least one layer");
    std::vector<int> dims{static_cast<int>(layers.front().weight.cols())};
    for (const auto& l : layers) {
      if (l.weight.cols() != dims.back() || l.bias.size() != l.weight.rows()) {
        throw Error(ErrorKind::InvalidParameter, "layer shapes do not chain");
      }
      if (!l.weight.allFinite() || !l.bias.allFinite()) {
        throw Error(ErrorKind::InvalidParameter, "network parameters must be finite");
      }
      dims.push_back(static_cast<int>(l.weight.rows()));
    }
    DenseNet net;
    net.dims_ = std::move(dims);
    net.layers_ = std::move(layers);
    return net;
  }

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  DenseNet zeros_like() const { return DenseNet(dims_); }

  void set_zero() {
    for (auto& l : layers_) {
      l.weight.setZero();
      l.bias.setZero();
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  /// Flat parameter view: each layer's weights (column-major storage) then its bias.
  double& parameter(std::size_t index) {
    for (auto& l : layers_) {
      const auto nw = static_cast<std::size_t>(l.weight.size());
      if (index < nw) return l.weight.data()[index];
      index -= nw;
      const auto nb = static_cast<std::size_t>(l.bias.size());
      if (index < nb) return l.bias[static_cast<Eigen::Index>(index)];
      index -= nb;
    }
    throw Error(ErrorKind::InvalidParameter, "parameter index out of range");
  }

  double parameter(std::size_t index) const { return const_cast<DenseNet*>(this)->parameter(index); }

  bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    check_input(x.size());
    Eigen::VectorXd h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Eigen::VectorXd y = layers_[i].bias;
      y.noalias() += layers_[i].weight * h;
      if (i + 1 < layers_.size()) y = y.cwiseMax(0.0);
      h = std::move(y);
    }
    return h;
  }

  /// Records the forward pass on `tape`. When `grad` is given (a network of
  /// the same shape), `backward` accumulates parameter gradients into it.
  /// The network must outlive the tape.
  ad::Var forward(ad::Tape& tape, ad::Var x, DenseNet* grad = nullptr) const {
    check_input(tape.value(x).size());
    ad::Var h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Eigen::MatrixXd* gw = grad ? &grad->layers_[i].weight : nullptr;
      Eigen::VectorXd* gb = grad ? &grad->layers_[i].bias : nullptr;
      h = tape.affine(layers_[i].weight, layers_[i].bias, h, gw, gb);
      if (i + 1 < layers_.size()) h = tape.relu(h);
    }
    return h;
  }

 private:
  void check_input(Eigen::Index n) const {
    if (dims_.empty()) throw Error(ErrorKind::InvalidParameter, "network has no layers");
    if (n != dims_.front()) {
      throw Error(ErrorKind::InvalidParameter, "network expects input of size " +
                                                   std::to_string(dims_.front()) + ", got " +
                                                   std::to_string(n));
    }
  }

  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
};

/// Layer widths `in -> hidden... -> out`.
inline std::vector<int> mlp_dims(int in, std::vector<int> hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace carigeo
