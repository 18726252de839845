// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/multitemporal.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mtsar/error.hpp"
#include "mtsar/io.hpp"
#include "mtsar/parallel.hpp"

namespace mtsar {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    std::ostringstream msg;
    msg << what << ": " << a.width() << "x" << a.height() << " vs " << b.width() << "x"
        << b.height();
    fail(ErrorCode::kDimensionMismatch, msg.str());
  }
}

Image finish_non_negative(std::size_t w, std::size_t h, std::vector<float> px, const char* what) {
  for (float v : px) {
    if (v < 0.0f) fail(ErrorCode::kInternal, std::string(what) + " produced a negative intensity");
  }
  return Image(w, h, std::move(px));
}

}  // namespace

double EpsilonPolicy::floor_for(const Image& denominator) const {
  validate_policy(*this);
  return std::max(eps_rel * mean(denominator),
                  static_cast<double>(std::numeric_limits<float>::min()));
}

void validate_policy(const EpsilonPolicy& policy) {
  if (!(policy.eps_rel > 0.0) || !std::isfinite(policy.eps_rel)) {
    fail(ErrorCode::kInvalidArgument, "epsilon eps_rel must be positive");
  }
}

Image super_image(const Stack& stack) {
  validate_stack(stack);
  SuperImageAccumulator acc(stack.width(), stack.height());
  for (const auto& img : stack.images) acc.update(img);
  return acc.current();
}

SuperImageAccumulator::SuperImageAccumulator(std::size_t width, std::size_t height)
    : width_(width), height_(height), sum_(width * height, 0.0) {}

SuperImageAccumulator::SuperImageAccumulator(const Image& running_sum, std::size_t count)
    : width_(running_sum.width()),
      height_(running_sum.height()),
      sum_(running_sum.pixels().begin(), running_sum.pixels().end()),
      count_(count) {}

void SuperImageAccumulator::update(const Image& image) {
  if (image.width() != width_ || image.height() != height_) {
    std::ostringstream msg;
    msg << "accumulator is " << width_ << "x" << height_ << ", image is " << image.width() << "x"
        << image.height();
    fail(ErrorCode::kDimensionMismatch, msg.str());
  }
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += image[i];
  ++count_;
}

Image SuperImageAccumulator::current() const {
  if (count_ == 0) fail(ErrorCode::kEmptyStack, "accumulator has absorbed no dates");
  const double n = static_cast<double>(count_);
  std::vector<float> px(sum_.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(sum_[i] / n);
  return Image(width_, height_, std::move(px));
}

Image SuperImageAccumulator::running_sum() const {
  std::vector<float> px(sum_.begin(), sum_.end());
  return Image(width_, height_, std::move(px));
}

std::filesystem::path accumulator_sidecar(const std::filesystem::path& sum_path) {
  auto p = sum_path;
  p += ".json";
  return p;
}

void SuperImageAccumulator::save(const std::filesystem::path& sum_path,
                                 const std::filesystem::path& sidecar_path) const {
  write_image(running_sum(), sum_path);
  std::ofstream out(sidecar_path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open '" + sidecar_path.string() + "' for writing");
  out << nlohmann::json{{"count", count_}}.dump() << '\n';
  if (!out) fail(ErrorCode::kIoFailure, "write to '" + sidecar_path.string() + "' failed");
}

SuperImageAccumulator SuperImageAccumulator::load(const std::filesystem::path& sum_path,
                                                  const std::filesystem::path& sidecar_path) {
  Image sum = read_image(sum_path);
  std::ifstream in(sidecar_path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open '" + sidecar_path.string() + "'");
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("count") ||
      !doc["count"].is_number_unsigned()) {
    fail(ErrorCode::kSchemaViolation,
         "'" + sidecar_path.string() + "' must be {\"count\": <non-negative integer>}");
  }
  return SuperImageAccumulator(sum, doc["count"].get<std::size_t>());
}

Image ratio_image(const Image& w, const Image& s, const EpsilonPolicy& policy) {
  require_same_shape(w, s, "ratio_image");
  const double floor = policy.floor_for(s);
  std::vector<float> px(w.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = static_cast<float>(static_cast<double>(w[i]) / std::max(static_cast<double>(s[i]), floor));
  }
  return Image(w.width(), w.height(), std::move(px));
}

Image quegan(const Stack& stack, const std::vector<Image>& preestimates, std::size_t t,
             const EpsilonPolicy& policy) {
  validate_stack(stack);
  const std::size_t T = stack.size();
  if (preestimates.size() != T) {
    fail(ErrorCode::kDimensionMismatch, "need one pre-estimate per date: got " +
                                            std::to_string(preestimates.size()) + " for " +
                                            std::to_string(T) + " dates");
  }
  if (t >= T) {
    fail(ErrorCode::kIndexOutOfRange,
         "date index " + std::to_string(t) + " outside [0, " + std::to_string(T) + ")");
  }
  std::vector<double> floors(T);
  for (std::size_t k = 0; k < T; ++k) {
    require_same_shape(preestimates[k], stack.images[k], "quegan pre-estimate");
    require_non_negative(stack.images[k], "quegan input");
    require_non_negative(preestimates[k], "quegan pre-estimate");
    floors[k] = policy.floor_for(preestimates[k]);
  }

  const std::size_t n = stack.images.front().size();
  std::vector<double> compensated(n, 0.0);
  for (std::size_t k = 0; k < T; ++k) {
    const Image& w = stack.images[k];
    const Image& pre = preestimates[k];
    for (std::size_t i = 0; i < n; ++i) {
      compensated[i] += static_cast<double>(w[i]) / std::max(static_cast<double>(pre[i]), floors[k]);
    }
  }
  const Image& pre_t = preestimates[t];
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<float>(static_cast<double>(pre_t[i]) * compensated[i] / static_cast<double>(T));
  }
  return finish_non_negative(stack.width(), stack.height(), std::move(out), "quegan");
}

std::vector<Image> compute_preestimates(const Stack& stack, const Despeckler& despeckler,
                                        std::size_t jobs) {
  validate_stack(stack);
  std::vector<Image> pre(stack.size());
  parallel_for(stack.size(), jobs, [&](std::size_t k) {
    pre[k] = despeckler(stack.images[k]);
    require_same_shape(pre[k], stack.images[k], "pre-estimate");
  });
  return pre;
}

Image quegan_with_despeckler(const Stack& stack, const DespecklerSpec& spec, std::size_t t,
                             const EpsilonPolicy& policy) {
  validate_stack(stack);
  if (t >= stack.size()) fail(ErrorCode::kIndexOutOfRange, "date index out of range");
  const auto pre = compute_preestimates(stack, make_despeckler(spec, stack.looks));
  return quegan(stack, pre, t, policy);
}

Image rabasar(const Image& w, const Image& s, const Despeckler& ratio_denoiser,
              const EpsilonPolicy& policy) {
  require_same_shape(w, s, "rabasar");
  require_non_negative(w, "rabasar input");
  require_non_negative(s, "rabasar super-image");
  const Image tau_hat = ratio_denoiser(ratio_image(w, s, policy));
  if (!tau_hat.same_shape(w)) fail(ErrorCode::kMalformedOutput, "ratio denoiser changed image size");
  std::vector<float> out(w.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (tau_hat[i] < 0.0f) fail(ErrorCode::kMalformedOutput, "ratio denoiser returned a negative value");
    out[i] = static_cast<float>(static_cast<double>(tau_hat[i]) * static_cast<double>(s[i]));
  }
  return finish_non_negative(w.width(), w.height(), std::move(out), "rabasar");
}

Image rabasar(const Image& w, const Image& s, const DespecklerSpec& ratio_denoiser,
              const EpsilonPolicy& policy, std::optional<double> looks) {
  return rabasar(w, s, make_despeckler(ratio_denoiser, looks), policy);
}

Image rabasar_denoised_super(const Stack& stack, std::size_t t, const Despeckler& super_denoiser,
                             const Despeckler& ratio_denoiser, const EpsilonPolicy& policy) {
  validate_stack(stack);
  if (t >= stack.size()) fail(ErrorCode::kIndexOutOfRange, "date index out of range");
  const Image s_hat = super_denoiser(super_image(stack));
  return rabasar(stack.images[t], s_hat, ratio_denoiser, policy);
}

Image rabasar_denoised_super(const Stack& stack, std::size_t t, const DespecklerSpec& super_denoiser,
                             const DespecklerSpec& ratio_denoiser, const EpsilonPolicy& policy) {
  return rabasar_denoised_super(stack, t, make_despeckler(super_denoiser, stack.looks),
                                make_despeckler(ratio_denoiser, stack.looks), policy);
}

}  // namespace mtsar
