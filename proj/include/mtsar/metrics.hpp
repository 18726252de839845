// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>

#include "mtsar/core.hpp"
#include "mtsar/multitemporal.hpp"

namespace mtsar {

// Sample statistics with the unbiased (n - 1) variance.
struct RegionStats {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};

RegionStats region_stats(const Image& image, const Region& region);

/// mean^2 / variance over the region; nullopt when the variance is zero.
std::optional<double> enl(const Image& image, const Region& region);
inline std::optional<double> enl(const Image& image) { return enl(image, Region::full(image)); }

double mse(const Image& estimate, const Image& truth);

// 10 log10(max(truth)^2 / mse). Returns +infinity when mse == 0.
double psnr(const Image& estimate, const Image& truth);

double mean_ratio(const Image& estimate, const Image& truth, const Region& region);
inline double mean_ratio(const Image& estimate, const Image& truth) {
  return mean_ratio(estimate, truth, Region::full(truth));
}

struct ResidualStats {
  double mean = 0.0;
  std::optional<double> enl;
};

/// Statistics of noisy / max(estimate, floor) over the full frame. For a
/// perfect estimate this is the speckle realization itself.
ResidualStats residual_stats(const Image& noisy, const Image& estimate,
                             const EpsilonPolicy& policy = {});

double log_variance(const Image& image, const Region& region);
inline double log_variance(const Image& image) { return log_variance(image, Region::full(image)); }

/// One metric value. `value` is empty when the metric is undefined
/// (zero-variance ENL) or infinite (zero-error PSNR); `flag` says which.
struct MetricReport {
  std::string name;
  std::optional<double> value;
  std::string flag;  // "", "undefined" or "+inf"
  std::optional<Region> region;
  std::map<std::string, std::string> params;
};

MetricReport make_report(std::string name, std::optional<double> value);

// Single-line JSON object, no trailing newline.
std::string to_json_line(const MetricReport& report);

}  // namespace mtsar
