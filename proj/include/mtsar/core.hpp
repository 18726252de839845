// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mtsar {

/// Single-band intensity raster in linear power units, row-major.
///
/// Every pixel is finite; the constructor rejects NaN/Inf. Images are
/// immutable once built, so they can be shared across threads freely.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, std::vector<float> pixels);

  static Image filled(std::size_t width, std::size_t height, float value);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  float at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  float operator[](std::size_t i) const { return pixels_[i]; }
  std::span<const float> pixels() const noexcept { return pixels_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<float> pixels_;
};

struct Region {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t w = 0;
  std::size_t h = 0;

  static Region full(const Image& image) { return {0, 0, image.width(), image.height()}; }
  std::size_t area() const noexcept { return w * h; }
  bool fits(const Image& image) const noexcept;

  friend bool operator==(const Region&, const Region&) = default;
};

/// Ordered, co-registered acquisitions sharing one nominal look count.
struct Stack {
  std::vector<Image> images;
  std::vector<std::string> dates;
  double looks = 1.0;

  std::size_t size() const noexcept { return images.size(); }
  std::size_t width() const noexcept { return images.empty() ? 0 : images.front().width(); }
  std::size_t height() const noexcept { return images.empty() ? 0 : images.front().height(); }
};

// Throws kEmptyStack, kDimensionMismatch, kNonPositiveLooks or
// kInvalidArgument (date/image count mismatch, duplicate labels).
void validate_stack(const Stack& stack);

Image crop(const Image& image, const Region& region);

// Elementwise helpers. Accumulations run in double.
double mean(const Image& image);
double mean(const Image& image, const Region& region);
Image scale(const Image& image, double factor);
Image multiply(const Image& a, const Image& b);

// Throws kNonPositiveValue if any pixel is below zero.
void require_non_negative(const Image& image, const char* what);

}  // namespace mtsar
