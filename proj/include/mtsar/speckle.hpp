// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mtsar/core.hpp"

namespace mtsar {

inline constexpr double kDefaultLooks = 4.0;

// SplitMix64 finalizer; also used to seed Xoshiro256.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** 1.0 (Blackman & Vigna). The state is filled from four
/// consecutive SplitMix64 outputs of the seed.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;
  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform in (0, 1).
  double uniform_open() noexcept;
  // Standard normal via the Marsaglia polar method, one value per call.
  double normal() noexcept;
  // Gamma(shape, 1) via Marsaglia-Tsang; shapes below one use the
  // G(shape + 1) * U^(1/shape) boost.
  double gamma(double shape) noexcept;

 private:
  std::uint64_t s_[4];
};

// Per-date seed: SplitMix64 applied to seed + (t + 1) * 0x9E3779B97F4A7C15.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Unit-mean Gamma(L, 1/L) intensity speckle, drawn in row-major order from
/// one Xoshiro256 stream seeded with `seed`.
Image sample_speckle(double looks, std::size_t width, std::size_t height, std::uint64_t seed);

/// w = v * u with u = sample_speckle(looks, dims, seed).
Image corrupt(const Image& reflectivity, double looks, std::uint64_t seed);

struct ConstantScene {
  double level = 100.0;
};
struct EdgeScene {
  double left = 50.0;
  double right = 200.0;
  std::size_t column = 0;  // first column carrying `right`
};
struct PointTargetsScene {
  double background = 50.0;
  double target = 5000.0;
  std::vector<std::pair<std::size_t, std::size_t>> positions;  // (x, y)
};
struct LinesScene {
  double background = 50.0;
  double level = 500.0;
  std::vector<std::size_t> rows;
};
using SceneKind = std::variant<ConstantScene, EdgeScene, PointTargetsScene, LinesScene>;

// Parses "constant:L", "edge:L,R,COL", "points:BG,TGT,X/Y;X/Y" and
// "lines:BG,LVL,ROW;ROW".
SceneKind parse_scene_kind(std::string_view text);

Image generate_scene(const SceneKind& kind, std::size_t width, std::size_t height);

struct ChangeEvent {
  std::size_t date = 0;  // first date showing the new value
  Region region;
  double value = 1.0;
};

/// Ground truth for a synthetic acquisition series. Events apply
/// cumulatively, in list order, to every date >= their index.
struct SceneScript {
  Image base;
  std::vector<ChangeEvent> events;
  std::size_t dates = 17;
  double looks = kDefaultLooks;
};

void validate_script(const SceneScript& script);

// Reflectivity of date t with every event of index <= t applied.
Image truth_at(const SceneScript& script, std::size_t t);

struct SimulatedStack {
  Stack stack;
  std::vector<Image> truth;
};

/// Date labels are "t00", "t01", ...; date t uses derive_seed(seed, t).
SimulatedStack generate_stack(const SceneScript& script, std::uint64_t seed);

}  // namespace mtsar
