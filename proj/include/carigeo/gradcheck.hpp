#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "carigeo/losses.hpp"
#include "carigeo/model.hpp"
#include "carigeo/rng.hpp"

namespace carigeo {

/// Scalar objectives the checker exercises.
enum class CheckedLoss {
  AdversarialCritic,  // critic objective, fakes from the generators, critic parameters
  Cycle,              // bidirectional L1 round trip, generator parameters
  Characteristic,     // both cosine terms, generator parameters
  Total,              // full objective in critic form, every parameter
  GeneratorTotal,     // full objective in generator form, generator parameters
};

inline const char* to_string(CheckedLoss l) {
  switch (l) {
    case CheckedLoss::AdversarialCritic: return "adversarial";
    case CheckedLoss::Cycle: return "cycle";
    case CheckedLoss::Characteristic: return "characteristic";
    case CheckedLoss::Total: return "total";
    case CheckedLoss::GeneratorTotal: return "generator_total";
  }
  return "?";
}

struct GradCheckCase {
  CheckedLoss loss = CheckedLoss::Total;
  int k = 0;
  int generator_depth = 0;  // hidden layers
  int discriminator_depth = 0;
  int batch = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // probes straddling a rectifier or |.| kink
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::uint64_t seed = 0;
  double step = 0.0;
  std::vector<GradCheckCase> cases;
  double max_rel_error = 0.0;
  double seconds = 0.0;
};

/// |a - n| / max(|a|, |n|, floor).
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

namespace gradcheck_detail {

inline ad::Var record(ad::Tape& t, const GeoGanModel& m, const ModelGrads& g, std::span<const ShapeVector> xs,
                      std::span<const ShapeVector> ys, const LossWeights& w, CheckedLoss which) {
  switch (which) {
    case CheckedLoss::AdversarialCritic: {
      const auto n = record_objective(t, m, g, xs, ys, w, AdversarialForm::Critic);
      return t.weighted_sum({{1.0, n.adv_x}, {1.0, n.adv_y}});
    }
    case CheckedLoss::Cycle: return record_objective(t, m, g, xs, ys, w, AdversarialForm::Critic).cyc;
    case CheckedLoss::Characteristic: {
      const auto n = record_objective(t, m, g, xs, ys, w, AdversarialForm::Critic);
      return t.weighted_sum({{1.0, n.cha_x}, {1.0, n.cha_y}});
    }
    case CheckedLoss::Total: return record_objective(t, m, g, xs, ys, w, AdversarialForm::Critic).total;
    case CheckedLoss::GeneratorTotal: return record_objective(t, m, g, xs, ys, w, AdversarialForm::Generator).total;
  }
  return {};
}

struct Evaluation {
  double value;
  std::uint64_t kinks;
};

}  // namespace gradcheck_detail

/// Compares tape gradients with central differences on one random model.
/// Only the networks the loss is meant to train are probed: critics for the
/// adversarial objective, generators for cycle/characteristic/generator-form,
/// all four for the full critic-form objective.
inline GradCheckCase check_case(Rng& rng, CheckedLoss which, int generator_depth, int discriminator_depth,
                                double h = 1e-5) {
  GradCheckCase out;
  out.loss = which;
  out.k = 2 + static_cast<int>(rng.index(4));
  out.generator_depth = generator_depth;
  out.discriminator_depth = discriminator_depth;
  out.batch = 1 + static_cast<int>(rng.index(2));

  auto widths = [&](int depth) {
    std::vector<int> w;
    for (int i = 0; i < depth; ++i) w.push_back(3 + static_cast<int>(rng.index(4)));
    return w;
  };
  TrainConfig cfg;
  cfg.generator_hidden = widths(generator_depth);
  cfg.discriminator_hidden = widths(discriminator_depth);
  GeoGanModel m = init_model(out.k, cfg, rng);
  for (DenseNet* net : {&m.g_xy, &m.g_yx, &m.d_x, &m.d_y}) {
    for (auto& l : net->layers()) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = rng.uniform(-0.3, 0.3);
    }
  }
  auto random_vec = [&] {
    ShapeVector v(out.k);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    return v;
  };
  m.mean_x = 0.3 * random_vec();
  m.mean_y = 0.3 * random_vec();
  std::vector<ShapeVector> xs, ys;
  for (int b = 0; b < out.batch; ++b) {
    xs.push_back(random_vec());
    ys.push_back(random_vec());
  }
  const LossWeights w{rng.uniform(0.5, 10.0), rng.uniform(0.5, 2.0)};

  DenseNet gxy = m.g_xy.zeros_like(), gyx = m.g_yx.zeros_like();
  DenseNet gdx = m.d_x.zeros_like(), gdy = m.d_y.zeros_like();
  const bool train_critics = which == CheckedLoss::AdversarialCritic || which == CheckedLoss::Total;
  const bool train_generators = which != CheckedLoss::AdversarialCritic;
  ModelGrads sinks;
  if (train_generators) sinks.g_xy = &gxy, sinks.g_yx = &gyx;
  if (train_critics) sinks.d_x = &gdx, sinks.d_y = &gdy;
  {
    ad::Tape t;
    t.backward(gradcheck_detail::record(t, m, sinks, xs, ys, w, which));
  }

  auto evaluate = [&]() {
    ad::Tape t(true);
    const ad::Var v = gradcheck_detail::record(t, m, {}, xs, ys, w, which);
    return gradcheck_detail::Evaluation{t.scalar_value(v), t.kink_signature()};
  };
  const auto base = evaluate();
  // Central differences cannot resolve gradients below the round-off of the
  // loss itself, so the floor follows the loss scale.
  const double floor = 1e-6 * std::max(1.0, std::abs(base.value));

  std::vector<std::pair<DenseNet*, const DenseNet*>> probes;
  if (train_generators) {
    probes.emplace_back(&m.g_xy, &gxy);
    probes.emplace_back(&m.g_yx, &gyx);
  }
  if (train_critics) {
    probes.emplace_back(&m.d_x, &gdx);
    probes.emplace_back(&m.d_y, &gdy);
  }
  for (auto [net, grad] : probes) {
    for (std::size_t p = 0; p < net->parameter_count(); ++p) {
      double& theta = net->parameter(p);
      const double saved = theta;
      theta = saved + h;
      const auto plus = evaluate();
      theta = saved - h;
      const auto minus = evaluate();
      theta = saved;
      if (plus.kinks != base.kinks || minus.kinks != base.kinks) {
        ++out.skipped;
        continue;
      }
      const double numeric = (plus.value - minus.value) / (2.0 * h);
      out.max_rel_error = std::max(out.max_rel_error, relative_error(grad->parameter(p), numeric, floor));
      ++out.checked;
    }
  }
  return out;
}

/// Runs `n_cases` random cases cycling through every loss and hidden depths 1-4.
inline GradCheckReport run_gradcheck(std::uint64_t seed, int n_cases = 20, double h = 1e-5) {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::array<CheckedLoss, 5> kLosses{CheckedLoss::AdversarialCritic, CheckedLoss::Cycle,
                                               CheckedLoss::Characteristic, CheckedLoss::Total,
                                               CheckedLoss::GeneratorTotal};
  GradCheckReport report;
  report.seed = seed;
  report.step = h;
  Rng rng(mix64(seed, 0x67726164ULL));
  for (int c = 0; c < n_cases; ++c) {
    const auto which = kLosses[static_cast<std::size_t>(c) % kLosses.size()];
    const int gdepth = 1 + c % 4;
    const int ddepth = 1 + (c / 4) % 4;
    report.cases.push_back(check_case(rng, which, gdepth, ddepth, h));
    report.max_rel_error = std::max(report.max_rel_error, report.cases.back().max_rel_error);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace carigeo
