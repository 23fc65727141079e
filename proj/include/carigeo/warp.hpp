#pragma once

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>
#include <vector>

#include "carigeo/image.hpp"
#include "carigeo/inference.hpp"
#include "carigeo/tps.hpp"

namespace carigeo {

inline constexpr double kDefaultWarpLambda = 1e-6;

struct WarpOptions {
  double lambda = kDefaultWarpLambda;
  bool pin_corners = false;  // add the four image corners as fixed control points
  int threads = 1;
};

/// Bilinear sample at (x, y) with coordinates clamped to the image; pixel
/// (i, j) sits at integer position (i, j). Returns the 3 channels unrounded.
inline std::array<double, 3> sample_bilinear(const ImageBuffer& img, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    out[static_cast<std::size_t>(c)] = (1.0 - fy) * top + fy * bottom;
  }
  return out;
}

/// Resamples `img` through a destination -> source map, one pixel at a time.
/// Rows are split across `threads`; every pixel depends only on its own
/// coordinates, so the result does not depend on the thread count.
template <typename Map>
ImageBuffer backward_warp(const ImageBuffer& img, const Map& dst_to_src, int threads = 1) {
  ImageBuffer out(img.width(), img.height());
  auto render_rows = [&](int y_begin, int y_end) {
    for (int y = y_begin; y < y_end; ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const Point p = dst_to_src(Point(x, y));
        const auto v = sample_bilinear(img, p.x(), p.y());
        for (int c = 0; c < 3; ++c) {
          out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v[static_cast<std::size_t>(c)]), 0L, 255L));
        }
      }
    }
  };
  const int n = std::clamp(threads, 1, img.height());
  if (n == 1) {
    render_rows(0, img.height());
    return out;
  }
  std::vector<std::jthread> workers;
  const int chunk = (img.height() + n - 1) / n;
  for (int t = 0; t < n; ++t) {
    const int b = t * chunk;
    const int e = std::min(img.height(), b + chunk);
    if (b < e) workers.emplace_back(render_rows, b, e);
  }
  workers.clear();
  return out;
}

/// Warps `img` so that content at landmarks `src` moves to `dst`. The spline
/// is fit from dst to src and evaluated at every output pixel.
inline ImageBuffer warp_image(const ImageBuffer& img, const LandmarkSet& src, const LandmarkSet& dst,
                              const WarpOptions& opt = {}) {
  std::vector<Point> from(dst.points().begin(), dst.points().end());
  std::vector<Point> to(src.points().begin(), src.points().end());
  if (opt.pin_corners) {
    const double w = img.width() - 1;
    const double h = img.height() - 1;
    for (const Point& c : {Point(0, 0), Point(w, 0), Point(0, h), Point(w, h)}) {
      from.push_back(c);
      to.push_back(c);
    }
  }
  const TpsTransform tps = fit_tps(from, to, opt.lambda);
  return backward_warp(img, tps, opt.threads);
}

/// Intermediate-domain sample: the caricature image moved onto the
/// photo-like geometry predicted by the reverse generator.
inline std::pair<ImageBuffer, LandmarkSet> build_intermediate(const ImageBuffer& cari_img, const LandmarkSet& ly,
                                                              const GeoGanModel& geo, const PcaModel& pca,
                                                              const WarpOptions& opt = {}) {
  LandmarkSet target = reverse_exaggerate(geo, pca, ly);
  ImageBuffer warped = warp_image(cari_img, ly, target, opt);
  return {std::move(warped), std::move(target)};
}

}  // namespace carigeo
