// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/core.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "mtsar/error.hpp"

namespace mtsar {

Image::Image(std::size_t width, std::size_t height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != width_ * height_) {
    std::ostringstream msg;
    msg << "pixel buffer holds " << pixels_.size() << " values, expected " << width_ << "x"
        << height_;
    fail(ErrorCode::kDimensionMismatch, msg.str());
  }
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (!std::isfinite(pixels_[i])) {
      fail(ErrorCode::kNonFinite, "non-finite pixel at index " + std::to_string(i));
    }
  }
}

Image Image::filled(std::size_t width, std::size_t height, float value) {
  return Image(width, height, std::vector<float>(width * height, value));
}

bool Region::fits(const Image& image) const noexcept {
  return x0 <= image.width() && y0 <= image.height() && w <= image.width() - x0 &&
         h <= image.height() - y0;
}

void validate_stack(const Stack& stack) {
  if (stack.images.empty()) fail(ErrorCode::kEmptyStack, "stack holds no images");
  if (stack.dates.size() != stack.images.size()) {
    fail(ErrorCode::kInvalidArgument, "stack has " + std::to_string(stack.images.size()) +
                                          " images but " + std::to_string(stack.dates.size()) +
                                          " date labels");
  }
  if (!(stack.looks > 0.0) || !std::isfinite(stack.looks)) {
    fail(ErrorCode::kNonPositiveLooks, "looks must be positive, got " + std::to_string(stack.looks));
  }
  const Image& first = stack.images.front();
  for (std::size_t t = 1; t < stack.images.size(); ++t) {
    const Image& img = stack.images[t];
    if (!img.same_shape(first)) {
      std::ostringstream msg;
      msg << "date " << t << " is " << img.width() << "x" << img.height() << ", expected "
          << first.width() << "x" << first.height();
      fail(ErrorCode::kDimensionMismatch, msg.str());
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& d : stack.dates) {
    if (!seen.insert(d).second) fail(ErrorCode::kInvalidArgument, "duplicate date label '" + d + "'");
  }
}

Image crop(const Image& image, const Region& region) {
  if (!region.fits(image)) {
    std::ostringstream msg;
    msg << "region (" << region.x0 << "," << region.y0 << "," << region.w << "," << region.h
        << ") exceeds " << image.width() << "x" << image.height();
    fail(ErrorCode::kOutOfBounds, msg.str());
  }
  std::vector<float> out;
  out.reserve(region.area());
  auto src = image.pixels();
  for (std::size_t y = 0; y < region.h; ++y) {
    auto row = src.subspan((region.y0 + y) * image.width() + region.x0, region.w);
    out.insert(out.end(), row.begin(), row.end());
  }
  return Image(region.w, region.h, std::move(out));
}

double mean(const Image& image) { return mean(image, Region::full(image)); }

double mean(const Image& image, const Region& region) {
  if (!region.fits(image)) fail(ErrorCode::kOutOfBounds, "region exceeds image bounds");
  if (region.area() == 0) fail(ErrorCode::kDegenerateRegion, "mean over an empty region");
  double sum = 0.0;
  for (std::size_t y = region.y0; y < region.y0 + region.h; ++y) {
    for (std::size_t x = region.x0; x < region.x0 + region.w; ++x) sum += image.at(x, y);
  }
  return sum / static_cast<double>(region.area());
}

Image scale(const Image& image, double factor) {
  std::vector<float> out(image.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(image[i]) * factor);
  }
  return Image(image.width(), image.height(), std::move(out));
}

Image multiply(const Image& a, const Image& b) {
  if (!a.same_shape(b)) fail(ErrorCode::kDimensionMismatch, "multiply: image sizes differ");
  std::vector<float> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(a[i]) * static_cast<double>(b[i]));
  }
  return Image(a.width(), a.height(), std::move(out));
}

void require_non_negative(const Image& image, const char* what) {
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] < 0.0f) {
      fail(ErrorCode::kNonPositiveValue,
           std::string(what) + " has negative intensity at index " + std::to_string(i));
    }
  }
}

}  // namespace mtsar
