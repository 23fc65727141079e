#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "carigeo/error.hpp"

namespace carigeo {

/// 8-bit RGB image, row-major, 3 samples per pixel.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, std::array<std::uint8_t, 3> fill = {0, 0, 0})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorKind::InvalidParameter,
                  "image size must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
    }
    data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
      data_[i] = fill[0];
      data_[i + 1] = fill[1];
      data_[i + 2] = fill[2];
    }
  }

  static ImageBuffer from_samples(int width, int height, std::vector<std::uint8_t> samples) {
    ImageBuffer img(width, height);
    if (samples.size() != img.data_.size()) {
      throw Error(ErrorKind::InvalidParameter, "sample count must be 3 * width * height");
    }
    img.data_ = std::move(samples);
    return img;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y) + static_cast<std::size_t>(c)]; }
  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y) + static_cast<std::size_t>(c)]; }

  void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
    const std::size_t i = index(x, y);
    data_[i] = rgb[0];
    data_[i + 1] = rgb[1];
    data_[i + 2] = rgb[2];
  }

  const std::vector<std::uint8_t>& samples() const { return data_; }
  std::vector<std::uint8_t>& samples() { return data_; }

  friend bool operator==(const ImageBuffer& a, const ImageBuffer& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace carigeo
