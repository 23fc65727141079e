#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carigeo/image.hpp"
#include "carigeo/io.hpp"
#include "carigeo/landmarks.hpp"
#include "carigeo/rng.hpp"

namespace carigeo {

/// Canonical face width in the 256x256 frame (contour ellipse diameter).
inline constexpr double kFaceSize = 156.0;

/// Canonical 63-point face: 33 contour points, 2x4 brow points, 2x6 eye
/// points, 4 nose points and 6 mouth points, in that index order.
inline LandmarkSet face_template() {
  using std::numbers::pi;
  std::array<Point, kLandmarkCount> p;
  std::size_t i = 0;
  for (int c = 0; c < 33; ++c) {
    const double t = pi / 2.0 + 2.0 * pi * c / 33.0;
    p[i++] = Point(128.0 + 78.0 * std::cos(t), 132.0 + 98.0 * std::sin(t));
  }
  const std::array<double, 4> brow_x{84.0, 94.0, 104.0, 114.0};
  const std::array<double, 4> brow_y{100.0, 96.0, 96.0, 99.0};
  for (int b = 0; b < 4; ++b) p[i++] = Point(brow_x[b], brow_y[b]);
  for (int b = 0; b < 4; ++b) p[i++] = Point(256.0 - brow_x[b], brow_y[b]);
  for (double cx : {99.0, 157.0}) {
    for (int e = 0; e < 6; ++e) {
      const double t = pi * e / 3.0;
      p[i++] = Point(cx + 13.0 * std::cos(t), 114.0 + 5.5 * std::sin(t));
    }
  }
  for (const Point& q : {Point(128, 120), Point(116, 152), Point(128, 158), Point(140, 152)}) p[i++] = q;
  for (int m = 0; m < 6; ++m) {
    const double t = pi * m / 3.0;
    p[i++] = Point(128.0 + 22.0 * std::cos(t), 186.0 + 9.0 * std::sin(t));
  }
  return LandmarkSet(p);
}

struct SynthConfig {
  int n_photos = 500;
  int n_caris = 500;
  std::uint64_t seed = 0;
  double variation_scale = 0.05;  // sigma as a fraction of kFaceSize
  double gamma_min = 1.5;
  double gamma_max = 2.5;
  double jitter = 0.05;           // caricature point jitter as a fraction of sigma
  bool render = false;

  double sigma_px() const { return variation_scale * kFaceSize; }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); };
    if (n_photos < 1 || n_caris < 1) fail("sample counts must be >= 1");
    if (!(variation_scale >= 0.0) || !std::isfinite(variation_scale)) fail("variation scale must be >= 0");
    if (!(gamma_min >= 1.0) || !(gamma_max >= gamma_min) || !std::isfinite(gamma_max)) {
      fail("exaggeration range must satisfy 1 <= gamma_min <= gamma_max");
    }
    if (!(jitter >= 0.0) || !std::isfinite(jitter)) fail("jitter must be >= 0");
  }
};

namespace synth_detail {

inline constexpr std::uint64_t kPhotoStream = 0x70686f746fULL;
inline constexpr std::uint64_t kCariStream = 0x63617269ULL;

/// Largest relative scale change of a group or of the contour radius. With
/// gamma up to 1 / 0.35 the amplified scale stays positive.
inline constexpr double kMaxRelativeStretch = 0.35;
/// Tighter limit for the contour radius, which has the inner features close by.
inline constexpr double kMaxContourStretch = 0.15;

inline double clamped_normal(Rng& rng) { return std::clamp(rng.normal(), -3.0, 3.0); }

/// Smooth, low-rank deviation from the template driven by 11 standard normal
/// modes: three radial contour harmonics, brow height, eye size, eye
/// spacing, nose width and length, mouth width, height and position.
inline std::array<Point, kLandmarkCount> smooth_offsets(const LandmarkSet& tmpl, double sigma, Rng& rng) {
  std::array<double, 11> z{};
  for (auto& v : z) v = clamped_normal(rng);
  std::array<Point, kLandmarkCount> d;
  d.fill(Point::Zero());

  // Relative size changes pass through a symmetric soft limit so that no
  // group turns inside out, even after caricature amplification.
  auto saturate = [](double rel, double cap = kMaxRelativeStretch) { return cap * std::tanh(rel / cap); };

  const auto& contour = layout::kContour;
  const Point center = tmpl.centroid(contour);
  for (std::size_t i = contour.first; i < contour.end(); ++i) {
    const Point r = tmpl[i] - center;
    const double t = std::atan2(r.y(), r.x());
    const double amp = 0.8 * z[0] + 0.6 * z[1] * std::cos(2 * t) + 0.6 * z[2] * std::sin(t);
    d[i] = saturate(sigma * amp / r.norm(), kMaxContourStretch) * r;
  }

  // Scales group `g` about its centroid so its extreme point moves by `amount` px per axis.
  auto stretch = [&](const layout::Group& g, double amount_x, double amount_y) {
    const Point c = tmpl.centroid(g);
    double ext_x = 0.0, ext_y = 0.0;
    for (std::size_t i = g.first; i < g.end(); ++i) {
      ext_x = std::max(ext_x, std::abs(tmpl[i].x() - c.x()));
      ext_y = std::max(ext_y, std::abs(tmpl[i].y() - c.y()));
    }
    for (std::size_t i = g.first; i < g.end(); ++i) {
      const Point r = tmpl[i] - c;
      d[i] += Point(ext_x > 0.0 ? saturate(amount_x / ext_x) * r.x() : 0.0,
                    ext_y > 0.0 ? saturate(amount_y / ext_y) * r.y() : 0.0);
    }
  };
  auto shift = [&](const layout::Group& g, const Point& by) {
    for (std::size_t i = g.first; i < g.end(); ++i) d[i] += by;
  };

  // Translations are limited by the free room to the neighbouring feature.
  auto extreme = [&](const layout::Group& g, int axis, bool upper) {
    double v = upper ? -1e300 : 1e300;
    for (std::size_t i = g.first; i < g.end(); ++i) v = upper ? std::max(v, tmpl[i][axis]) : std::min(v, tmpl[i][axis]);
    return v;
  };
  auto limited = [&](double amount, double room) { return room * saturate(amount / room); };
  // Brows and the eye tops move towards each other; each side gets half the gap.
  const double brow_room = 0.5 * (extreme(layout::kLeftEye, 1, false) - extreme(layout::kLeftBrow, 1, true));
  const double eye_room = tmpl.centroid(layout::kContour).x() - extreme(layout::kLeftEye, 0, true);
  const double mouth_room = extreme(layout::kMouth, 1, false) - extreme(layout::kNose, 1, true);

  const double brow = limited(sigma * z[3], brow_room);
  shift(layout::kLeftBrow, Point(0.0, brow));
  shift(layout::kRightBrow, Point(0.0, brow));
  stretch(layout::kLeftEye, sigma * z[4], 0.5 * sigma * z[4]);
  stretch(layout::kRightEye, sigma * z[4], 0.5 * sigma * z[4]);
  const double spacing = limited(0.3 * sigma * z[5], eye_room);
  shift(layout::kLeftEye, Point(-spacing, 0.0));
  shift(layout::kRightEye, Point(spacing, 0.0));
  stretch(layout::kNose, sigma * z[6], sigma * z[7]);
  stretch(layout::kMouth, sigma * z[8], 0.5 * sigma * z[9]);
  shift(layout::kMouth, Point(0.0, limited(0.5 * sigma * z[10], mouth_room)));
  return d;
}

}  // namespace synth_detail

/// Photo-domain shape for sample `index`; a pure function of (seed, index).
inline LandmarkSet sample_photo_shape(const LandmarkSet& tmpl, const SynthConfig& cfg, std::uint64_t index) {
  Rng rng(mix64(cfg.seed, synth_detail::kPhotoStream, index));
  const auto d = synth_detail::smooth_offsets(tmpl, cfg.sigma_px(), rng);
  std::array<Point, kLandmarkCount> p;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) p[i] = tmpl[i] + d[i];
  return LandmarkSet(p);
}

struct CariSample {
  LandmarkSet shape;
  std::array<double, layout::kGroups.size()> gamma{};  // per-group exaggeration factors
  LandmarkSet base;                                   // the photo-like shape before amplification
};

/// Caricature-domain shape: a photo-like draw whose per-group deviation from
/// the template is amplified by gamma_g ~ U[gamma_min, gamma_max], plus
/// independent per-coordinate jitter.
inline CariSample sample_cari_shape(const LandmarkSet& tmpl, const SynthConfig& cfg, std::uint64_t index) {
  Rng rng(mix64(cfg.seed, synth_detail::kCariStream, index));
  const double sigma = cfg.sigma_px();
  const auto d = synth_detail::smooth_offsets(tmpl, sigma, rng);
  CariSample out;
  for (auto& g : out.gamma) g = rng.uniform(cfg.gamma_min, cfg.gamma_max);
  std::array<Point, kLandmarkCount> base, shape;
  for (std::size_t g = 0; g < layout::kGroups.size(); ++g) {
    const auto& grp = layout::kGroups[g];
    for (std::size_t i = grp.first; i < grp.end(); ++i) {
      base[i] = tmpl[i] + d[i];
      shape[i] = tmpl[i] + out.gamma[g] * d[i];
    }
  }
  const double jitter = cfg.jitter * sigma;
  if (jitter > 0.0) {
    for (auto& p : shape) p += Point(rng.normal(), rng.normal()) * jitter;
  }
  out.shape = LandmarkSet(shape);
  out.base = LandmarkSet(base);
  return out;
}

// ---------------------------------------------------------------------------
// Flat-shaded rendering

namespace render_detail {

/// Even-odd rule point-in-polygon test.
inline bool inside(std::span<const Point> poly, const Point& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

inline double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

inline std::vector<Point> group_points(const LandmarkSet& l, const layout::Group& g) {
  return {l.points().begin() + static_cast<std::ptrdiff_t>(g.first),
          l.points().begin() + static_cast<std::ptrdiff_t>(g.end())};
}

}  // namespace render_detail

/// Deterministic flat-shaded face: background, filled contour, brows as
/// thick polylines, eyes with pupils, nose and mouth polygons. Pixel (x, y)
/// is shaded by the primitive covering the point (x, y).
inline ImageBuffer render_face(const LandmarkSet& l, int width = 256, int height = 256) {
  using namespace render_detail;
  ImageBuffer img(width, height, {32, 36, 48});
  const auto contour = group_points(l, layout::kContour);
  const std::array<std::vector<Point>, 2> brows{group_points(l, layout::kLeftBrow), group_points(l, layout::kRightBrow)};
  const std::array<std::vector<Point>, 2> eyes{group_points(l, layout::kLeftEye), group_points(l, layout::kRightEye)};
  const std::array<Point, 2> pupils{l.centroid(layout::kLeftEye), l.centroid(layout::kRightEye)};
  const auto nose = group_points(l, layout::kNose);
  const auto mouth = group_points(l, layout::kMouth);
  constexpr double kBrowHalfWidth = 2.5;
  constexpr double kPupilRadius = 2.5;

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Point p(x, y);
      if (!inside(contour, p)) continue;
      std::array<std::uint8_t, 3> c{224, 186, 152};
      if (inside(nose, p)) c = {196, 146, 116};
      if (inside(mouth, p)) c = {176, 58, 70};
      for (int e = 0; e < 2; ++e) {
        if (inside(eyes[e], p)) c = (p - pupils[e]).norm() <= kPupilRadius ? std::array<std::uint8_t, 3>{40, 30, 30}
                                                                              : std::array<std::uint8_t, 3>{245, 245, 240};
      }
      for (const auto& brow : brows) {
        for (std::size_t i = 0; i + 1 < brow.size(); ++i) {
          if (segment_distance(p, brow[i], brow[i + 1]) <= kBrowHalfWidth) c = {72, 46, 32};
        }
      }
      img.set(x, y, c);
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Dataset directories: photos/NNNN.lmk, caris/NNNN.lmk (+ .png), manifest.json

inline std::string sample_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return buf;
}

inline std::uint64_t template_checksum() { return fnv1a(format_landmarks(face_template(), LmkPrecision::RoundTrip)); }

inline nlohmann::ordered_json synth_manifest(const SynthConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["config"] = {{"variation_scale", cfg.variation_scale},
                 {"gamma_min", cfg.gamma_min},
                 {"gamma_max", cfg.gamma_max},
                 {"jitter", cfg.jitter},
                 {"render", cfg.render}};
  j["counts"] = {{"photos", cfg.n_photos}, {"caris", cfg.n_caris}};
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(template_checksum()));
  j["template_checksum"] = hex;
  return j;
}

using ImageWriter = std::function<void(const ImageBuffer&, const std::filesystem::path&)>;

/// Writes a full dataset. Per-caricature ground-truth factors go to
/// caris/gamma.csv (one row per sample, one column per layout group).
/// Rendered faces are written through `write_image` when `cfg.render` is set.
inline void write_dataset(const std::filesystem::path& dir, const SynthConfig& cfg,
                          LmkPrecision precision = LmkPrecision::Canonical9, const ImageWriter& write_image = {}) {
  namespace fs = std::filesystem;
  cfg.validate();
  const LandmarkSet tmpl = face_template();
  fs::create_directories(dir / "photos");
  fs::create_directories(dir / "caris");
  for (int i = 0; i < cfg.n_photos; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const LandmarkSet l = sample_photo_shape(tmpl, cfg, idx);
    save_landmarks(l, dir / "photos" / (sample_stem(idx) + ".lmk"), precision);
    if (cfg.render && write_image) write_image(render_face(l), dir / "photos" / (sample_stem(idx) + ".png"));
  }
  std::string gamma_csv;
  for (std::size_t g = 0; g < layout::kGroups.size(); ++g) {
    gamma_csv += layout::kGroups[g].name;
    gamma_csv += g + 1 < layout::kGroups.size() ? ',' : '\n';
  }
  for (int i = 0; i < cfg.n_caris; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const CariSample s = sample_cari_shape(tmpl, cfg, idx);
    save_landmarks(s.shape, dir / "caris" / (sample_stem(idx) + ".lmk"), precision);
    if (cfg.render && write_image) write_image(render_face(s.shape), dir / "caris" / (sample_stem(idx) + ".png"));
    for (std::size_t g = 0; g < s.gamma.size(); ++g) {
      gamma_csv += format_double(s.gamma[g], LmkPrecision::RoundTrip);
      gamma_csv += g + 1 < s.gamma.size() ? ',' : '\n';
    }
  }
  write_file_atomic(dir / "caris" / "gamma.csv", gamma_csv);
  write_file_atomic(dir / "manifest.json", synth_manifest(cfg).dump(2) + "\n");
}

/// All .lmk files of one dataset subdirectory, in file-name order.
inline std::vector<LandmarkSet> load_landmark_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".lmk") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LandmarkSet> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_landmarks(f));
  return out;
}

}  // namespace carigeo
