// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "mtsar/core.hpp"
#include "mtsar/despeckle.hpp"

namespace mtsar {

/// Division guard. A denominator image D is floored at
/// max(eps_rel * mean(D), FLT_MIN) before dividing.
struct EpsilonPolicy {
  double eps_rel = 1e-6;

  double floor_for(const Image& denominator) const;
};

void validate_policy(const EpsilonPolicy& policy);

/// s = (1/T) sum_t w_t with double accumulation.
Image super_image(const Stack& stack);

/// Running temporal sum, so a stored super-image can absorb new dates in
/// O(pixels) without revisiting the archive. Single writer.
class SuperImageAccumulator {
 public:
  SuperImageAccumulator(std::size_t width, std::size_t height);
  // Resumes from a persisted running sum.
  SuperImageAccumulator(const Image& running_sum, std::size_t count);

  void update(const Image& image);
  Image current() const;

  std::size_t count() const noexcept { return count_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  Image running_sum() const;

  // State files: the running sum as .sarr plus a JSON sidecar {"count": T}.
  void save(const std::filesystem::path& sum_path, const std::filesystem::path& sidecar_path) const;
  static SuperImageAccumulator load(const std::filesystem::path& sum_path,
                                    const std::filesystem::path& sidecar_path);

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> sum_;
  std::size_t count_ = 0;
};

// Sidecar path conventionally paired with a state .sarr: "<path>.json".
std::filesystem::path accumulator_sidecar(const std::filesystem::path& sum_path);

/// tau = w / max(s, floor(s)).
Image ratio_image(const Image& w, const Image& s, const EpsilonPolicy& policy = {});

/// Change-compensated temporal average for date t:
///   v_t = (1/T) sum_k pre_t * w_k / max(pre_k, floor(pre_k)).
/// `preestimates` holds one reflectivity estimate per date.
Image quegan(const Stack& stack, const std::vector<Image>& preestimates, std::size_t t,
             const EpsilonPolicy& policy = {});

// Despeckles every date once; the result serves all output dates.
std::vector<Image> compute_preestimates(const Stack& stack, const Despeckler& despeckler,
                                        std::size_t jobs = 1);

Image quegan_with_despeckler(const Stack& stack, const DespecklerSpec& spec, std::size_t t,
                             const EpsilonPolicy& policy = {});

/// Ratio-based restoration: despeckle w / s, then multiply back by s.
Image rabasar(const Image& w, const Image& s, const Despeckler& ratio_denoiser,
              const EpsilonPolicy& policy = {});
Image rabasar(const Image& w, const Image& s, const DespecklerSpec& ratio_denoiser,
              const EpsilonPolicy& policy = {}, std::optional<double> looks = std::nullopt);

/// rabasar() against a despeckled super-image.
Image rabasar_denoised_super(const Stack& stack, std::size_t t, const Despeckler& super_denoiser,
                             const Despeckler& ratio_denoiser, const EpsilonPolicy& policy = {});
Image rabasar_denoised_super(const Stack& stack, std::size_t t, const DespecklerSpec& super_denoiser,
                             const DespecklerSpec& ratio_denoiser, const EpsilonPolicy& policy = {});

}  // namespace mtsar
