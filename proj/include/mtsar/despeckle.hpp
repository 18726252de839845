// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mtsar/core.hpp"

namespace mtsar {

inline constexpr double kDefaultPluginTimeout = 300.0;
inline constexpr const char* kLooksEnvVar = "MTSAR_LOOKS";

struct IdentitySpec {
  friend bool operator==(const IdentitySpec&, const IdentitySpec&) = default;
};

struct BoxcarSpec {
  int window = 3;  // odd, >= 1
  friend bool operator==(const BoxcarSpec&, const BoxcarSpec&) = default;
};

/// A denoiser plugin run as `command... <in.sarr> <out.sarr>`.
struct ExternalSpec {
  std::vector<std::string> command;
  double timeout_seconds = kDefaultPluginTimeout;
  friend bool operator==(const ExternalSpec&, const ExternalSpec&) = default;
};

using DespecklerSpec = std::variant<IdentitySpec, BoxcarSpec, ExternalSpec>;

void validate_spec(const DespecklerSpec& spec);

// "identity", "boxcar:K" or "external:CMD [ARG...]" (whitespace-split).
DespecklerSpec parse_despeckler_spec(std::string_view text,
                                     double timeout_seconds = kDefaultPluginTimeout);
std::string describe(const DespecklerSpec& spec);

/// k x k moving average with mirror padding (reflection without repeating
/// the edge pixel). Sums run in double, so constant inputs come back exact
/// and every output lies within the input min/max.
Image boxcar(const Image& image, int window);

/// Runs the plugin protocol for one image. `looks`, when set, is exported
/// to the plugin as MTSAR_LOOKS. Each call works in its own temporary
/// directory, so concurrent calls are safe.
Image external_invoke(const Image& image, const std::vector<std::string>& command,
                      double timeout_seconds, std::optional<double> looks = std::nullopt);

Image despeckle(const Image& image, const DespecklerSpec& spec,
                std::optional<double> looks = std::nullopt);

/// Single-image reflectivity estimator. Anything callable fits, which is
/// how tests inject doubles into the multi-temporal pipelines.
using Despeckler = std::function<Image(const Image&)>;

Despeckler make_despeckler(const DespecklerSpec& spec, std::optional<double> looks = std::nullopt);

struct PluginCaps {
  int protocol = 0;
  std::string name;
};

// Runs `command --caps`; throws kMalformedOutput unless the reply is a JSON
// object with protocol == 1 and a string name.
PluginCaps query_caps(const std::vector<std::string>& command,
                      double timeout_seconds = kDefaultPluginTimeout);

}  // namespace mtsar
