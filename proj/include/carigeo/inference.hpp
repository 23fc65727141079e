#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "carigeo/losses.hpp"
#include "carigeo/model.hpp"
#include "carigeo/pca.hpp"
#include "carigeo/shape_core.hpp"

namespace carigeo {

/// Caricature landmarks for a photo: l_x + alpha * (l_y - l_x), where l_y is
/// the generator output mapped back to landmark space. alpha = 0 returns the
/// input unchanged, alpha = 1 the model output, alpha in (1, 2] extrapolates.
inline LandmarkSet exaggerate(const GeoGanModel& model, const PcaModel& pca, const LandmarkSet& lx, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw Error(ErrorKind::InvalidParameter, "alpha must be in [0, 2], got " + std::to_string(alpha));
  }
  return interpolate_landmarks(lx, reconstruct(pca, model.g_xy.forward(project(pca, lx))), alpha);
}

/// Photo-domain landmarks for a caricature.
inline LandmarkSet reverse_exaggerate(const GeoGanModel& model, const PcaModel& pca, const LandmarkSet& ly) {
  return reconstruct(pca, model.g_yx.forward(project(pca, ly)));
}

/// Rule-based baseline: mean + factor * (l - mean), per point.
inline LandmarkSet baseline_amplify(const LandmarkSet& l, const LandmarkSet& mean, double factor) {
  if (!std::isfinite(factor)) throw Error(ErrorKind::InvalidParameter, "factor must be finite");
  std::array<Point, kLandmarkCount> out;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) out[i] = mean[i] + factor * (l[i] - mean[i]);
  return LandmarkSet(out);
}

struct EvalReport {
  std::size_t photos = 0;
  std::size_t caris = 0;
  // Round trips in shape-vector space, L1.
  double cycle_l1_x = 0.0;      // photo -> caricature -> photo
  double cycle_l1_y = 0.0;      // caricature -> photo -> caricature
  double deviation_l1_x = 0.0;  // mean |l_x - mean_x|_1
  double deviation_l1_y = 0.0;
  double cycle_ratio_x = 0.0;   // cycle_l1_x / deviation_l1_x
  // cos(l - mean_in, G(l) - mean_out), averaged.
  double characteristic_cos_xy = 0.0;
  double characteristic_cos_yx = 0.0;
  // Total variance of generated vectors over that of the real target domain.
  double collapse_ratio = 0.0;          // g_xy(photos) vs caris
  double collapse_ratio_reverse = 0.0;  // g_yx(caris) vs photos
  double d_y_real = 0.0;
  double d_y_fake = 0.0;
  double d_x_real = 0.0;
  double d_x_fake = 0.0;
  // Landmark space, deviations measured from the photo-domain mean face.
  double mean_deviation_in_px = 0.0;
  double mean_deviation_out_px = 0.0;
  double exaggerated_fraction = 0.0;  // alpha=1 output deviates more than its input
  double alpha_monotone_fraction = 0.0;
};

namespace detail {

/// Mean squared distance to the centroid, computed on offsets from the first
/// sample so that identical inputs give exactly zero.
inline double total_variance(std::span<const ShapeVector> v) {
  ShapeVector mean = ShapeVector::Zero(v.front().size());
  for (const auto& x : v) mean += x - v.front();
  mean /= static_cast<double>(v.size());
  double sum = 0.0;
  for (const auto& x : v) sum += ((x - v.front()) - mean).squaredNorm();
  return sum / static_cast<double>(v.size());
}

inline double cosine_eps(const ShapeVector& a, const ShapeVector& b) {
  return a.dot(b) / ((a.norm() + kCosineEps) * (b.norm() + kCosineEps));
}

}  // namespace detail

inline constexpr std::array<double, 5> kAlphaSweep{0.0, 0.5, 1.0, 1.5, 2.0};

/// Held-out metrics for a trained model. Inputs are aligned landmark sets.
/// Samples are processed in index order, so the report is deterministic.
inline EvalReport eval_model(const GeoGanModel& model, const PcaModel& pca, std::span<const LandmarkSet> photos,
                             std::span<const LandmarkSet> caris) {
  if (photos.empty() || caris.empty()) throw Error(ErrorKind::EmptyInput, "evaluation needs photos and caricatures");
  model.validate();
  if (model.k() != pca.k()) throw Error(ErrorKind::InvalidParameter, "model and PCA dimensions differ");

  EvalReport r;
  r.photos = photos.size();
  r.caris = caris.size();
  const LandmarkSet mean_face = reconstruct(pca, model.mean_x);

  std::vector<ShapeVector> vx, vy, gen_y, gen_x;
  for (const auto& l : photos) vx.push_back(project(pca, l));
  for (const auto& l : caris) vy.push_back(project(pca, l));

  std::size_t exaggerated = 0, monotone = 0;
  for (std::size_t i = 0; i < photos.size(); ++i) {
    const ShapeVector fy = model.g_xy.forward(vx[i]);
    gen_y.push_back(fy);
    r.cycle_l1_x += (model.g_yx.forward(fy) - vx[i]).cwiseAbs().sum();
    r.deviation_l1_x += (vx[i] - model.mean_x).cwiseAbs().sum();
    r.characteristic_cos_xy += detail::cosine_eps(vx[i] - model.mean_x, fy - model.mean_y);
    r.d_y_fake += model.d_y.forward(fy)[0];
    r.d_x_real += model.d_x.forward(vx[i])[0];

    const LandmarkSet ly = reconstruct(pca, fy);
    const double dev_in = shape_distance(photos[i], mean_face);
    const double dev_out = shape_distance(ly, mean_face);
    r.mean_deviation_in_px += dev_in;
    r.mean_deviation_out_px += dev_out;
    if (dev_out > dev_in) ++exaggerated;

    std::array<double, kAlphaSweep.size()> norms{};
    for (std::size_t a = 0; a < kAlphaSweep.size(); ++a) {
      norms[a] = shape_distance(interpolate_landmarks(photos[i], ly, kAlphaSweep[a]), mean_face);
    }
    const bool up = std::is_sorted(norms.begin(), norms.end());
    const bool down = std::is_sorted(norms.rbegin(), norms.rend());
    if (up || down) ++monotone;
  }
  for (std::size_t i = 0; i < caris.size(); ++i) {
    const ShapeVector fx = model.g_yx.forward(vy[i]);
    gen_x.push_back(fx);
    r.cycle_l1_y += (model.g_xy.forward(fx) - vy[i]).cwiseAbs().sum();
    r.deviation_l1_y += (vy[i] - model.mean_y).cwiseAbs().sum();
    r.characteristic_cos_yx += detail::cosine_eps(vy[i] - model.mean_y, fx - model.mean_x);
    r.d_x_fake += model.d_x.forward(fx)[0];
    r.d_y_real += model.d_y.forward(vy[i])[0];
  }

  const double nx = static_cast<double>(photos.size());
  const double ny = static_cast<double>(caris.size());
  r.cycle_l1_x /= nx;
  r.deviation_l1_x /= nx;
  r.cycle_ratio_x = r.deviation_l1_x > 0.0 ? r.cycle_l1_x / r.deviation_l1_x : 0.0;
  r.characteristic_cos_xy /= nx;
  r.d_y_fake /= nx;
  r.d_x_real /= nx;
  r.mean_deviation_in_px /= nx;
  r.mean_deviation_out_px /= nx;
  r.exaggerated_fraction = static_cast<double>(exaggerated) / nx;
  r.alpha_monotone_fraction = static_cast<double>(monotone) / nx;
  r.cycle_l1_y /= ny;
  r.deviation_l1_y /= ny;
  r.characteristic_cos_yx /= ny;
  r.d_x_fake /= ny;
  r.d_y_real /= ny;

  const double var_y = detail::total_variance(vy);
  const double var_x = detail::total_variance(vx);
  r.collapse_ratio = var_y > 0.0 ? detail::total_variance(gen_y) / var_y : 0.0;
  r.collapse_ratio_reverse = var_x > 0.0 ? detail::total_variance(gen_x) / var_x : 0.0;
  return r;
}

}  // namespace carigeo
