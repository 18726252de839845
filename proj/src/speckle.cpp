// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/speckle.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "mtsar/error.hpp"

namespace mtsar {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

void require_positive_level(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::kNonPositiveValue, std::string(what) + " must be positive");
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view s, std::string_view context) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::kInvalidArgument,
         "bad number '" + std::string(s) + "' in scene '" + std::string(context) + "'");
  }
  return value;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += kGoldenGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
  for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::uniform_open() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Xoshiro256::normal() noexcept {
  while (true) {
    const double a = 2.0 * uniform() - 1.0;
    const double b = 2.0 * uniform() - 1.0;
    const double r2 = a * a + b * b;
    if (r2 > 0.0 && r2 < 1.0) return a * std::sqrt(-2.0 * std::log(r2) / r2);
  }
}

double Xoshiro256::gamma(double shape) noexcept {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t state = seed + (index + 1) * kGoldenGamma;
  return splitmix64(state);
}

Image sample_speckle(double looks, std::size_t width, std::size_t height, std::uint64_t seed) {
  if (!(looks > 0.0) || !std::isfinite(looks)) {
    fail(ErrorCode::kNonPositiveLooks, "speckle looks must be positive");
  }
  if (width == 0 || height == 0) fail(ErrorCode::kInvalidArgument, "speckle dims must be >= 1");
  Xoshiro256 rng(seed);
  std::vector<float> u(width * height);
  for (auto& px : u) px = static_cast<float>(rng.gamma(looks) / looks);
  return Image(width, height, std::move(u));
}

Image corrupt(const Image& reflectivity, double looks, std::uint64_t seed) {
  for (std::size_t i = 0; i < reflectivity.size(); ++i) {
    if (!(reflectivity[i] > 0.0f)) {
      fail(ErrorCode::kNonPositiveValue,
           "reflectivity must be strictly positive (index " + std::to_string(i) + ")");
    }
  }
  const Image u = sample_speckle(looks, reflectivity.width(), reflectivity.height(), seed);
  return multiply(reflectivity, u);
}

SceneKind parse_scene_kind(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::kInvalidArgument, "scene '" + std::string(text) + "' lacks a ':' parameter list");
  }
  const auto kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');
  auto need = [&](std::size_t n) {
    if (args.size() != n) {
      fail(ErrorCode::kInvalidArgument, "scene '" + std::string(text) + "' expects " +
                                            std::to_string(n) + " parameters");
    }
  };
  if (kind == "constant") {
    need(1);
    return ConstantScene{parse_number<double>(args[0], text)};
  }
  if (kind == "edge") {
    need(3);
    return EdgeScene{parse_number<double>(args[0], text), parse_number<double>(args[1], text),
                     parse_number<std::size_t>(args[2], text)};
  }
  if (kind == "points") {
    need(3);
    PointTargetsScene scene{parse_number<double>(args[0], text),
                            parse_number<double>(args[1], text), {}};
    for (auto pos : split(args[2], ';')) {
      auto xy = split(pos, '/');
      if (xy.size() != 2) fail(ErrorCode::kInvalidArgument, "point target must be X/Y");
      scene.positions.emplace_back(parse_number<std::size_t>(xy[0], text),
                                   parse_number<std::size_t>(xy[1], text));
    }
    return scene;
  }
  if (kind == "lines") {
    need(3);
    LinesScene scene{parse_number<double>(args[0], text), parse_number<double>(args[1], text), {}};
    for (auto row : split(args[2], ';')) scene.rows.push_back(parse_number<std::size_t>(row, text));
    return scene;
  }
  fail(ErrorCode::kInvalidArgument, "unknown scene kind '" + std::string(kind) + "'");
}

Image generate_scene(const SceneKind& kind, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) fail(ErrorCode::kInvalidArgument, "scene dims must be >= 1");
  std::vector<float> px(width * height);
  struct Painter {
    std::vector<float>& px;
    std::size_t width;
    std::size_t height;

    void operator()(const ConstantScene& s) const {
      require_positive_level(s.level, "constant level");
      std::fill(px.begin(), px.end(), static_cast<float>(s.level));
    }
    void operator()(const EdgeScene& s) const {
      require_positive_level(s.left, "edge left level");
      require_positive_level(s.right, "edge right level");
      if (s.column > width) fail(ErrorCode::kOutOfBounds, "edge column beyond image width");
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
          px[y * width + x] = static_cast<float>(x < s.column ? s.left : s.right);
        }
      }
    }
    void operator()(const PointTargetsScene& s) const {
      require_positive_level(s.background, "point background");
      require_positive_level(s.target, "point target level");
      std::fill(px.begin(), px.end(), static_cast<float>(s.background));
      for (auto [x, y] : s.positions) {
        if (x >= width || y >= height) fail(ErrorCode::kOutOfBounds, "point target outside image");
        px[y * width + x] = static_cast<float>(s.target);
      }
    }
    void operator()(const LinesScene& s) const {
      require_positive_level(s.background, "line background");
      require_positive_level(s.level, "line level");
      std::fill(px.begin(), px.end(), static_cast<float>(s.background));
      for (auto y : s.rows) {
        if (y >= height) fail(ErrorCode::kOutOfBounds, "line row outside image");
        std::fill_n(px.begin() + static_cast<std::ptrdiff_t>(y * width), width,
                    static_cast<float>(s.level));
      }
    }
  };
  std::visit(Painter{px, width, height}, kind);
  return Image(width, height, std::move(px));
}

void validate_script(const SceneScript& script) {
  if (script.base.empty()) fail(ErrorCode::kInvalidArgument, "scene script has no base image");
  if (script.dates == 0) fail(ErrorCode::kEmptyStack, "scene script needs at least one date");
  if (!(script.looks > 0.0) || !std::isfinite(script.looks)) {
    fail(ErrorCode::kNonPositiveLooks, "scene script looks must be positive");
  }
  for (std::size_t i = 0; i < script.base.size(); ++i) {
    if (!(script.base[i] > 0.0f)) {
      fail(ErrorCode::kNonPositiveValue, "scene base reflectivity must be strictly positive");
    }
  }
  for (const auto& ev : script.events) {
    if (ev.date >= script.dates) {
      fail(ErrorCode::kIndexOutOfRange, "change event date " + std::to_string(ev.date) +
                                            " outside [0, " + std::to_string(script.dates) + ")");
    }
    require_positive_level(ev.value, "change event value");
    if (!ev.region.fits(script.base)) fail(ErrorCode::kOutOfBounds, "change event region outside image");
  }
}

Image truth_at(const SceneScript& script, std::size_t t) {
  if (t >= script.dates) fail(ErrorCode::kIndexOutOfRange, "date index out of range");
  std::vector<float> px(script.base.pixels().begin(), script.base.pixels().end());
  const std::size_t width = script.base.width();
  for (const auto& ev : script.events) {
    if (ev.date > t) continue;
    for (std::size_t y = ev.region.y0; y < ev.region.y0 + ev.region.h; ++y) {
      std::fill_n(px.begin() + static_cast<std::ptrdiff_t>(y * width + ev.region.x0), ev.region.w,
                  static_cast<float>(ev.value));
    }
  }
  return Image(width, script.base.height(), std::move(px));
}

SimulatedStack generate_stack(const SceneScript& script, std::uint64_t seed) {
  validate_script(script);
  SimulatedStack out;
  out.stack.looks = script.looks;
  for (std::size_t t = 0; t < script.dates; ++t) {
    Image v = truth_at(script, t);
    out.stack.images.push_back(corrupt(v, script.looks, derive_seed(seed, t)));
    std::ostringstream label;
    label << 't' << std::setw(2) << std::setfill('0') << t;
    out.stack.dates.push_back(label.str());
    out.truth.push_back(std::move(v));
  }
  return out;
}

}  // namespace mtsar
