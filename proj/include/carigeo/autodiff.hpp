#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "carigeo/error.hpp"

/// Vector-valued reverse-mode differentiation.
///
/// A Tape records the forward evaluation of a loss as a list of nodes, each
/// holding a dense value and a closure that pushes its gradient to the
/// nodes it was computed from. Trainable parameters never live on the tape:
/// `affine` receives pointers to external gradient buffers and accumulates
/// into them during `backward`, so one tape can drive several networks and
/// a network may appear on a tape without receiving parameter gradients.
namespace carigeo::ad {

struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  /// When enabled, rectifier and absolute-value branches are folded into
  /// `kink_signature()`; finite-difference checks use it to skip probes
  /// that cross a non-differentiable point.
  explicit Tape(bool track_kinks = false) : track_kinks_(track_kinks) {}

  Var constant(Eigen::VectorXd value) { return push(std::move(value), false, {}); }

  Var scalar(double value) { return constant(Eigen::VectorXd::Constant(1, value)); }

  const Eigen::VectorXd& value(Var v) const { return nodes_[v.id].value; }
  double scalar_value(Var v) const { return nodes_[v.id].value[0]; }
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  std::size_t size() const { return nodes_.size(); }
  std::uint64_t kink_signature() const { return kinks_; }

  /// Gradient of the last `backward` loss with respect to `v` (zero if unreached).
  Eigen::VectorXd grad(Var v) const {
    const Node& n = nodes_[v.id];
    return n.grad.size() ? n.grad : Eigen::VectorXd::Zero(n.value.size());
  }

  /// y = W x + b. Parameter gradients accumulate into `grad_w`/`grad_b` when non-null.
  Var affine(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, Var x, Eigen::MatrixXd* grad_w,
             Eigen::VectorXd* grad_b) {
    if (w.cols() != value(x).size() || w.rows() != b.size()) {
      throw Error(ErrorKind::InvalidParameter,
                  "affine: weight is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                      ", input has " + std::to_string(value(x).size()) + " entries");
    }
    Eigen::VectorXd y = b;
    y.noalias() += w * value(x);
    const bool trainable = grad_w != nullptr || grad_b != nullptr;
    const bool need = trainable || needs_grad(x);
    return push(std::move(y), need, [&w, x, grad_w, grad_b](Tape& t, const Eigen::VectorXd& g) {
      if (grad_w) grad_w->noalias() += g * t.value(x).transpose();
      if (grad_b) *grad_b += g;
      if (t.needs_grad(x)) t.accumulate(x).noalias() += w.transpose() * g;
    });
  }

  /// max(0, x); the subgradient at 0 is 0.
  Var relu(Var x) {
    Eigen::VectorXd y = value(x).cwiseMax(0.0);
    if (track_kinks_) fold_signs(value(x));
    return push(std::move(y), needs_grad(x), [x](Tape& t, const Eigen::VectorXd& g) {
      t.accumulate(x).array() += (t.value(x).array() > 0.0).select(g.array(), 0.0);
    });
  }

  Var add(Var a, Var b) {
    check_same_size(a, b, "add");
    return push(value(a) + value(b), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Eigen::VectorXd& g) {
                  if (t.needs_grad(a)) t.accumulate(a) += g;
                  if (t.needs_grad(b)) t.accumulate(b) += g;
                });
  }

  Var sub(Var a, Var b) {
    check_same_size(a, b, "sub");
    return push(value(a) - value(b), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Eigen::VectorXd& g) {
                  if (t.needs_grad(a)) t.accumulate(a) += g;
                  if (t.needs_grad(b)) t.accumulate(b) -= g;
                });
  }

  /// s * a + c, elementwise.
  Var scale_shift(Var a, double s, double c = 0.0) {
    Eigen::VectorXd y = (s * value(a)).array() + c;
    return push(std::move(y), needs_grad(a),
                [a, s](Tape& t, const Eigen::VectorXd& g) { t.accumulate(a) += s * g; });
  }

  /// Sum of absolute values; sign(0) = 0.
  Var l1_norm(Var a) {
    if (track_kinks_) fold_signs(value(a));
    return push(Eigen::VectorXd::Constant(1, value(a).cwiseAbs().sum()), needs_grad(a),
                [a](Tape& t, const Eigen::VectorXd& g) {
                  t.accumulate(a) += g[0] * t.value(a).cwiseSign();
                });
  }

  /// sum_i (a_i - target)^2.
  Var squared_offset(Var a, double target) {
    const Eigen::VectorXd diff = value(a).array() - target;
    return push(Eigen::VectorXd::Constant(1, diff.squaredNorm()), needs_grad(a),
                [a, target](Tape& t, const Eigen::VectorXd& g) {
                  t.accumulate(a) += (2.0 * g[0]) * (t.value(a).array() - target).matrix();
                });
  }

  /// a.b / ((|a| + eps)(|b| + eps)).
  Var cosine(Var a, Var b, double eps) {
    check_same_size(a, b, "cosine");
    const double na = value(a).norm();
    const double nb = value(b).norm();
    const double da = na + eps;
    const double db = nb + eps;
    const double dot = value(a).dot(value(b));
    return push(Eigen::VectorXd::Constant(1, dot / (da * db)), needs_grad(a) || needs_grad(b),
                [a, b, na, nb, da, db, dot](Tape& t, const Eigen::VectorXd& g) {
                  const double s = g[0];
                  if (t.needs_grad(a)) {
                    Eigen::VectorXd& ga = t.accumulate(a);
                    ga += (s / (da * db)) * t.value(b);
                    if (na > 0.0) ga -= (s * dot / (da * da * db * na)) * t.value(a);
                  }
                  if (t.needs_grad(b)) {
                    Eigen::VectorXd& gb = t.accumulate(b);
                    gb += (s / (da * db)) * t.value(a);
                    if (nb > 0.0) gb -= (s * dot / (da * db * db * nb)) * t.value(b);
                  }
                });
  }

  /// c + sum_i w_i * v_i over scalar nodes.
  Var weighted_sum(std::vector<std::pair<double, Var>> terms, double c = 0.0) {
    double total = c;
    bool need = false;
    for (const auto& [w, v] : terms) {
      if (value(v).size() != 1) throw Error(ErrorKind::InvalidParameter, "weighted_sum: non-scalar term");
      total += w * scalar_value(v);
      need = need || needs_grad(v);
    }
    return push(Eigen::VectorXd::Constant(1, total), need,
                [terms = std::move(terms)](Tape& t, const Eigen::VectorXd& g) {
                  for (const auto& [w, v] : terms) {
                    if (t.needs_grad(v)) t.accumulate(v)[0] += w * g[0];
                  }
                });
  }

  Var weighted_sum(std::initializer_list<std::pair<double, Var>> terms, double c = 0.0) {
    return weighted_sum(std::vector<std::pair<double, Var>>(terms), c);
  }

  /// Reverse sweep from a scalar node. Parameter buffers passed to `affine`
  /// receive accumulated gradients; they are not cleared here.
  void backward(Var loss) {
    if (value(loss).size() != 1) throw Error(ErrorKind::InvalidParameter, "backward needs a scalar loss");
    for (auto& n : nodes_) n.grad.resize(0);
    accumulate(loss)[0] = 1.0;
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.needs_grad || n.grad.size() == 0 || !n.backward) continue;
      if (!n.grad.allFinite()) {
        throw Error(ErrorKind::NumericalFailure, "non-finite gradient at tape node " + std::to_string(i));
      }
      // The closure may grow other nodes' gradients but never this one's.
      const Eigen::VectorXd g = std::move(n.grad);
      n.backward(*this, g);
      nodes_[i].grad = g;
    }
  }

 private:
  using Backward = std::function<void(Tape&, const Eigen::VectorXd&)>;

  struct Node {
    Eigen::VectorXd value;
    Eigen::VectorXd grad;
    bool needs_grad = false;
    Backward backward;
  };

  Var push(Eigen::VectorXd value, bool needs_grad, Backward backward) {
    if (!value.allFinite()) {
      throw Error(ErrorKind::NumericalFailure,
                  "non-finite value at tape node " + std::to_string(nodes_.size()));
    }
    nodes_.push_back(Node{std::move(value), Eigen::VectorXd(), needs_grad,
                          needs_grad ? std::move(backward) : Backward{}});
    return Var{nodes_.size() - 1};
  }

  Eigen::VectorXd& accumulate(Var v) {
    Node& n = nodes_[v.id];
    if (n.grad.size() == 0) n.grad = Eigen::VectorXd::Zero(n.value.size());
    return n.grad;
  }

  void check_same_size(Var a, Var b, const char* op) const {
    if (value(a).size() != value(b).size()) {
      throw Error(ErrorKind::InvalidParameter, std::string(op) + ": size mismatch " +
                                                   std::to_string(value(a).size()) + " vs " +
                                                   std::to_string(value(b).size()));
    }
  }

  void fold_signs(const Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const std::uint64_t s = x[i] > 0.0 ? 1 : (x[i] < 0.0 ? 2 : 3);
      kinks_ = (kinks_ ^ s) * 0x100000001b3ULL;
    }
  }

  std::vector<Node> nodes_;
  bool track_kinks_ = false;
  std::uint64_t kinks_ = 0xcbf29ce484222325ULL;
};

}  // namespace carigeo::ad
