// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "mtsar/error.hpp"

namespace mtsar {

namespace {

void require_region(const Image& image, const Region& region, std::size_t min_pixels) {
  if (!region.fits(image)) fail(ErrorCode::kOutOfBounds, "metric region exceeds image bounds");
  if (region.area() < min_pixels) {
    fail(ErrorCode::kDegenerateRegion, "metric region needs at least " + std::to_string(min_pixels) +
                                           " pixels, has " + std::to_string(region.area()));
  }
}

template <typename Fn>
void for_each_in(const Image& image, const Region& region, Fn&& fn) {
  for (std::size_t y = region.y0; y < region.y0 + region.h; ++y) {
    for (std::size_t x = region.x0; x < region.x0 + region.w; ++x) fn(image.at(x, y));
  }
}

}  // namespace

RegionStats region_stats(const Image& image, const Region& region) {
  require_region(image, region, 2);
  RegionStats st;
  st.count = region.area();
  double sum = 0.0;
  for_each_in(image, region, [&](float v) { sum += v; });
  st.mean = sum / static_cast<double>(st.count);
  // Two-pass variance.
  double ss = 0.0;
  for_each_in(image, region, [&](float v) {
    const double d = v - st.mean;
    ss += d * d;
  });
  st.variance = ss / static_cast<double>(st.count - 1);
  return st;
}

std::optional<double> enl(const Image& image, const Region& region) {
  const auto st = region_stats(image, region);
  if (st.variance == 0.0) return std::nullopt;
  return st.mean * st.mean / st.variance;
}

double mse(const Image& estimate, const Image& truth) {
  if (!estimate.same_shape(truth)) fail(ErrorCode::kDimensionMismatch, "mse: image sizes differ");
  if (truth.empty()) fail(ErrorCode::kDegenerateRegion, "mse of empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = static_cast<double>(estimate[i]) - truth[i];
    sum += d * d;
  }
  return sum / static_cast<double>(truth.size());
}

double psnr(const Image& estimate, const Image& truth) {
  const double err = mse(estimate, truth);
  const double peak = *std::max_element(truth.pixels().begin(), truth.pixels().end());
  if (!(peak > 0.0)) fail(ErrorCode::kNonPositiveValue, "psnr needs a positive peak in the truth image");
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / err);
}

double mean_ratio(const Image& estimate, const Image& truth, const Region& region) {
  if (!estimate.same_shape(truth)) fail(ErrorCode::kDimensionMismatch, "mean_ratio: image sizes differ");
  require_region(truth, region, 1);
  const double truth_mean = mean(truth, region);
  if (!(truth_mean > 0.0)) fail(ErrorCode::kNonPositiveValue, "mean_ratio needs positive truth");
  return mean(estimate, region) / truth_mean;
}

ResidualStats residual_stats(const Image& noisy, const Image& estimate, const EpsilonPolicy& policy) {
  const Image r = ratio_image(noisy, estimate, policy);
  const auto st = region_stats(r, Region::full(r));
  ResidualStats out;
  out.mean = st.mean;
  if (st.variance > 0.0) out.enl = st.mean * st.mean / st.variance;
  return out;
}

double log_variance(const Image& image, const Region& region) {
  require_region(image, region, 2);
  // Logs are taken relative to the first pixel.
  const double ref = std::log(static_cast<double>(image.at(region.x0, region.y0)));
  double sum = 0.0;
  for_each_in(image, region, [&](float v) {
    if (!(v > 0.0f)) fail(ErrorCode::kNonPositiveValue, "log_variance needs strictly positive pixels");
    sum += std::log(static_cast<double>(v)) - ref;
  });
  const double n = static_cast<double>(region.area());
  const double m = sum / n;
  double ss = 0.0;
  for_each_in(image, region, [&](float v) {
    const double d = std::log(static_cast<double>(v)) - ref - m;
    ss += d * d;
  });
  return ss / (n - 1.0);
}

MetricReport make_report(std::string name, std::optional<double> value) {
  MetricReport r;
  r.name = std::move(name);
  if (!value) {
    r.flag = "undefined";
  } else if (std::isinf(*value) && *value > 0) {
    r.flag = "+inf";
  } else {
    r.value = value;
  }
  return r;
}

std::string to_json_line(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["value"] = report.value ? nlohmann::ordered_json(*report.value) : nlohmann::ordered_json(nullptr);
  if (!report.flag.empty()) j["flag"] = report.flag;
  if (report.region) {
    j["region"] = {report.region->x0, report.region->y0, report.region->w, report.region->h};
  }
  if (!report.params.empty()) j["params"] = report.params;
  return j.dump();
}

}  // namespace mtsar
