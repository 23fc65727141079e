#pragma once

#include <span>
#include <vector>

#include "carigeo/autodiff.hpp"
#include "carigeo/model.hpp"

namespace carigeo {

inline constexpr double kCosineEps = 1e-8;

/// Tape builders for the geometry objective. Each returns a scalar node.
namespace loss {

/// Least-squares critic objective: (d(real) - 1)^2 + d(fake)^2.
inline ad::Var adversarial_critic(ad::Tape& t, ad::Var d_real, ad::Var d_fake) {
  return t.weighted_sum({{1.0, t.squared_offset(d_real, 1.0)}, {1.0, t.squared_offset(d_fake, 0.0)}});
}

/// Least-squares generator objective: (d(fake) - 1)^2.
inline ad::Var adversarial_generator(ad::Tape& t, ad::Var d_fake) { return t.squared_offset(d_fake, 1.0); }

/// |reconstruction - original|_1.
inline ad::Var cycle(ad::Tape& t, ad::Var reconstruction, ad::Var original) {
  return t.l1_norm(t.sub(reconstruction, original));
}

/// 1 - cos(input - mean_in, output - mean_out).
inline ad::Var characteristic(ad::Tape& t, ad::Var input, ad::Var output, ad::Var mean_in, ad::Var mean_out) {
  return t.scale_shift(t.cosine(t.sub(input, mean_in), t.sub(output, mean_out), kCosineEps), -1.0, 1.0);
}

/// Mean of scalar nodes.
inline ad::Var mean(ad::Tape& t, const std::vector<ad::Var>& terms) {
  std::vector<std::pair<double, ad::Var>> weighted;
  const double w = 1.0 / static_cast<double>(terms.size());
  for (ad::Var v : terms) weighted.emplace_back(w, v);
  return t.weighted_sum(std::move(weighted));
}

}  // namespace loss

struct LossWeights {
  double lambda_cyc = 10.0;
  double lambda_cha = 1.0;
};

/// Which form the adversarial terms of the full objective take.
enum class AdversarialForm {
  Critic,     // (d(real)-1)^2 + d(G(x))^2, gradients reach every network
  Generator,  // (d(G(x))-1)^2, used for the generator update
};

/// Optional gradient sinks, one per network.
struct ModelGrads {
  DenseNet* g_xy = nullptr;
  DenseNet* g_yx = nullptr;
  DenseNet* d_x = nullptr;
  DenseNet* d_y = nullptr;
};

struct ObjectiveNodes {
  ad::Var adv_x, adv_y, cyc, cha_x, cha_y, total;
  std::vector<ad::Var> fake_x;  // g_yx(caris)
  std::vector<ad::Var> fake_y;  // g_xy(photos)
};

/// Records the full geometry objective for a batch of unpaired samples:
///   adv_x + adv_y + lambda_cyc * cyc + lambda_cha * (cha_x + cha_y)
/// Every term is a batch mean. `adv_y`/`cha_y` belong to the photo ->
/// caricature generator, `adv_x`/`cha_x` to the reverse one.
inline ObjectiveNodes record_objective(ad::Tape& t, const GeoGanModel& m, const ModelGrads& grads,
                                       std::span<const ShapeVector> photos, std::span<const ShapeVector> caris,
                                       const LossWeights& w, AdversarialForm form) {
  if (photos.empty() || photos.size() != caris.size()) {
    throw Error(ErrorKind::EmptyInput, "objective needs equally sized, non-empty photo and caricature batches");
  }
  const ad::Var mean_x = t.constant(m.mean_x);
  const ad::Var mean_y = t.constant(m.mean_y);
  ObjectiveNodes out;
  std::vector<ad::Var> adv_x, adv_y, cyc, cha_x, cha_y;
  for (std::size_t i = 0; i < photos.size(); ++i) {
    const ad::Var lx = t.constant(photos[i]);
    const ad::Var ly = t.constant(caris[i]);
    const ad::Var fake_y = m.g_xy.forward(t, lx, grads.g_xy);
    const ad::Var rec_x = m.g_yx.forward(t, fake_y, grads.g_yx);
    const ad::Var fake_x = m.g_yx.forward(t, ly, grads.g_yx);
    const ad::Var rec_y = m.g_xy.forward(t, fake_x, grads.g_xy);
    out.fake_x.push_back(fake_x);
    out.fake_y.push_back(fake_y);

    const ad::Var dy_fake = m.d_y.forward(t, fake_y, grads.d_y);
    const ad::Var dx_fake = m.d_x.forward(t, fake_x, grads.d_x);
    if (form == AdversarialForm::Critic) {
      adv_y.push_back(loss::adversarial_critic(t, m.d_y.forward(t, ly, grads.d_y), dy_fake));
      adv_x.push_back(loss::adversarial_critic(t, m.d_x.forward(t, lx, grads.d_x), dx_fake));
    } else {
      adv_y.push_back(loss::adversarial_generator(t, dy_fake));
      adv_x.push_back(loss::adversarial_generator(t, dx_fake));
    }
    cyc.push_back(t.weighted_sum({{1.0, loss::cycle(t, rec_x, lx)}, {1.0, loss::cycle(t, rec_y, ly)}}));
    cha_y.push_back(loss::characteristic(t, lx, fake_y, mean_x, mean_y));
    cha_x.push_back(loss::characteristic(t, ly, fake_x, mean_y, mean_x));
  }
  out.adv_x = loss::mean(t, adv_x);
  out.adv_y = loss::mean(t, adv_y);
  out.cyc = loss::mean(t, cyc);
  out.cha_x = loss::mean(t, cha_x);
  out.cha_y = loss::mean(t, cha_y);
  out.total = t.weighted_sum(
      {{1.0, out.adv_x}, {1.0, out.adv_y}, {w.lambda_cyc, out.cyc}, {w.lambda_cha, out.cha_x}, {w.lambda_cha, out.cha_y}});
  return out;
}

/// Batch-mean critic objective with the fakes held constant.
inline ad::Var record_critic_loss(ad::Tape& t, const DenseNet& d, DenseNet* grad, std::span<const ShapeVector> real,
                                  std::span<const ShapeVector> fake) {
  if (real.empty() || real.size() != fake.size()) {
    throw Error(ErrorKind::EmptyInput, "critic loss needs equally sized, non-empty batches");
  }
  std::vector<ad::Var> terms;
  for (std::size_t i = 0; i < real.size(); ++i) {
    terms.push_back(loss::adversarial_critic(t, d.forward(t, t.constant(real[i]), grad),
                                             d.forward(t, t.constant(fake[i]), grad)));
  }
  return loss::mean(t, terms);
}

// Value-level forms for single samples.

inline double loss_adv_d(const DenseNet& d, const ShapeVector& real, const ShapeVector& fake) {
  ad::Tape t;
  return t.scalar_value(loss::adversarial_critic(t, d.forward(t, t.constant(real)), d.forward(t, t.constant(fake))));
}

inline double loss_adv_g(const DenseNet& d, const ShapeVector& fake) {
  ad::Tape t;
  return t.scalar_value(loss::adversarial_generator(t, d.forward(t, t.constant(fake))));
}

inline double loss_cyc(const DenseNet& g_xy, const DenseNet& g_yx, const ShapeVector& lx, const ShapeVector& ly) {
  ad::Tape t;
  const ad::Var x = t.constant(lx);
  const ad::Var y = t.constant(ly);
  const ad::Var rx = g_yx.forward(t, g_xy.forward(t, x));
  const ad::Var ry = g_xy.forward(t, g_yx.forward(t, y));
  return t.scalar_value(t.weighted_sum({{1.0, loss::cycle(t, rx, x)}, {1.0, loss::cycle(t, ry, y)}}));
}

/// One direction of the characteristic loss: 1 - cos(lx - mean_in, g(lx) - mean_out).
inline double loss_cha(const DenseNet& g, const ShapeVector& lx, const ShapeVector& mean_in,
                       const ShapeVector& mean_out) {
  ad::Tape t;
  const ad::Var x = t.constant(lx);
  return t.scalar_value(
      loss::characteristic(t, x, g.forward(t, x), t.constant(mean_in), t.constant(mean_out)));
}

struct LossBreakdown {
  double adv_x = 0.0;
  double adv_y = 0.0;
  double cyc = 0.0;
  double cha_x = 0.0;
  double cha_y = 0.0;
  double total = 0.0;
};

/// Full objective on a batch, adversarial terms in critic form.
inline LossBreakdown loss_total(std::span<const ShapeVector> photos, std::span<const ShapeVector> caris,
                                const GeoGanModel& m, const LossWeights& w) {
  ad::Tape t;
  const auto n = record_objective(t, m, {}, photos, caris, w, AdversarialForm::Critic);
  return {t.scalar_value(n.adv_x), t.scalar_value(n.adv_y), t.scalar_value(n.cyc),
          t.scalar_value(n.cha_x), t.scalar_value(n.cha_y), t.scalar_value(n.total)};
}

}  // namespace carigeo
