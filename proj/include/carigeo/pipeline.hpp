#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "carigeo/inference.hpp"
#include "carigeo/pca.hpp"
#include "carigeo/shape_core.hpp"
#include "carigeo/train.hpp"

/// Glue between raw landmark sets and the shape-vector models: every set is
/// aligned to the anchors of a mean face before it is projected, and results
/// are carried back to the caller's frame afterwards.
namespace carigeo {

struct AlignedDomains {
  AnchorTriple target;
  std::vector<LandmarkSet> photos;
  std::vector<LandmarkSet> caris;
};

inline std::vector<LandmarkSet> align_all(std::span<const LandmarkSet> sets, const AnchorTriple& target) {
  std::vector<LandmarkSet> out;
  out.reserve(sets.size());
  for (const auto& l : sets) out.push_back(align_to_mean(l, target).first);
  return out;
}

/// Aligns both domains to the anchors of the mean of their union.
inline AlignedDomains align_domains(std::span<const LandmarkSet> photos, std::span<const LandmarkSet> caris) {
  std::vector<LandmarkSet> all(photos.begin(), photos.end());
  all.insert(all.end(), caris.begin(), caris.end());
  AlignedDomains d;
  d.target = anchor_points(mean_shape(all));
  d.photos = align_all(photos, d.target);
  d.caris = align_all(caris, d.target);
  return d;
}

/// Joint model over both aligned domains. With `variance_fraction` set, k is
/// the smallest count reaching it (capped at `k`); otherwise exactly `k`.
inline PcaModel fit_joint_pca(const AlignedDomains& d, Eigen::Index k, std::optional<double> variance_fraction = {}) {
  std::vector<LandmarkSet> all(d.photos.begin(), d.photos.end());
  all.insert(all.end(), d.caris.begin(), d.caris.end());
  if (variance_fraction) return fit_pca_to_fraction(all, *variance_fraction, k);
  return fit_pca(all, k);
}

inline std::vector<ShapeVector> project_all(const PcaModel& pca, std::span<const LandmarkSet> sets) {
  std::vector<ShapeVector> out;
  out.reserve(sets.size());
  for (const auto& l : sets) out.push_back(project(pca, l));
  return out;
}

/// Applies `fn` to `l` aligned onto the anchors of the model mean and maps the
/// result back through the inverse alignment.
template <typename Fn>
LandmarkSet in_mean_frame(const PcaModel& pca, const LandmarkSet& l, Fn&& fn) {
  const auto [aligned, t] = align_to_mean(l, anchor_points(mean_landmarks(pca)));
  return apply_affine(t.inverse(), fn(aligned));
}

/// Exaggeration of an unaligned photo. The blend happens in the input frame,
/// so alpha = 0 reproduces `lx` exactly.
inline LandmarkSet exaggerate_unaligned(const GeoGanModel& model, const PcaModel& pca, const LandmarkSet& lx,
                                        double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw Error(ErrorKind::InvalidParameter, "alpha must be in [0, 2], got " + std::to_string(alpha));
  }
  if (alpha == 0.0) return lx;
  const LandmarkSet ly = in_mean_frame(pca, lx, [&](const LandmarkSet& a) { return exaggerate(model, pca, a, 1.0); });
  return interpolate_landmarks(lx, ly, alpha);
}

inline LandmarkSet reverse_unaligned(const GeoGanModel& model, const PcaModel& pca, const LandmarkSet& ly) {
  return in_mean_frame(pca, ly, [&](const LandmarkSet& a) { return reverse_exaggerate(model, pca, a); });
}

}  // namespace carigeo
