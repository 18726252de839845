// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "json.hpp"
#include "mtsar/error.hpp"
#include "mtsar/metrics.hpp"
#include "mtsar/speckle.hpp"
#include "oracles.hpp"

using namespace mtsar;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST(Enl, ConstantIsUndefined) { EXPECT_FALSE(enl(Image::filled(5, 5, 3.0f)).has_value()); }

TEST(Enl, TwoValues) {
  const auto e = enl(Image(2, 1, {1.0f, 3.0f}));
  ASSERT_TRUE(e);
  EXPECT_DOUBLE_EQ(*e, 2.0);
}

TEST(Enl, MatchesDirectFormula) {
  std::mt19937_64 rng(1);
  const Image img = oracle::random_image(30, 20, rng);
  const Region r{3, 4, 17, 9};
  const auto v = oracle::as_doubles(crop(img, r));
  const double m = oracle::sample_mean(v);
  EXPECT_NEAR(*enl(img, r), m * m / oracle::sample_variance(v), 1e-9 * m * m / oracle::sample_variance(v));
}

TEST(Enl, PureSpeckleFourLooks) {
  const auto e = enl(sample_speckle(4.0, 512, 512, 2024));
  ASSERT_TRUE(e);
  EXPECT_GE(*e, 3.6);
  EXPECT_LE(*e, 4.4);
}

TEST(Enl, DegenerateRegion) {
  const Image img = Image::filled(4, 4, 1.0f);
  EXPECT_EQ(code_of([&] { enl(img, Region{0, 0, 1, 1}); }), ErrorCode::kDegenerateRegion);
  EXPECT_EQ(code_of([&] { enl(img, Region{3, 3, 2, 2}); }), ErrorCode::kOutOfBounds);
}

TEST(Enl, PropertyScaleInvariant) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Image img = oracle::random_image(16, 16, rng);
    const double c = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    EXPECT_NEAR(*enl(scale(img, c)), *enl(img), 1e-5 * *enl(img));
  }
}

TEST(Mse, Examples) {
  std::mt19937_64 rng(3);
  const Image t = oracle::random_image(8, 8, rng);
  EXPECT_EQ(mse(t, t), 0.0);
  EXPECT_EQ(mse(Image(1, 1, {3.0f}), Image(1, 1, {1.0f})), 4.0);
  std::vector<float> shifted(t.pixels().begin(), t.pixels().end());
  for (auto& v : shifted) v += 2.0f;
  EXPECT_NEAR(mse(Image(8, 8, shifted), t), 4.0, 1e-4);
  EXPECT_EQ(code_of([&] { mse(t, Image::filled(8, 7, 1.0f)); }), ErrorCode::kDimensionMismatch);
}

TEST(Mse, PropertySymmetricAndNonNegative) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Image a = oracle::random_image(7, 5, rng), b = oracle::random_image(7, 5, rng);
    EXPECT_EQ(mse(a, b), mse(b, a));
    EXPECT_GT(mse(a, b), 0.0);
  }
}

TEST(Psnr, Examples) {
  const Image truth = Image::filled(4, 4, 100.0f);
  EXPECT_TRUE(std::isinf(psnr(truth, truth)));
  EXPECT_DOUBLE_EQ(psnr(Image::filled(4, 4, 90.0f), truth), 20.0);
  EXPECT_EQ(code_of([&] { psnr(truth, Image::filled(4, 4, 0.0f)); }), ErrorCode::kNonPositiveValue);
  EXPECT_EQ(code_of([&] { psnr(truth, Image::filled(4, 3, 1.0f)); }), ErrorCode::kDimensionMismatch);
}

TEST(Psnr, PropertyScaleCancels) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Image e = oracle::random_image(9, 9, rng), t = oracle::random_image(9, 9, rng);
    for (double c : {0.01, 7.0, 1e4}) EXPECT_NEAR(psnr(scale(e, c), scale(t, c)), psnr(e, t), 1e-5);
  }
}

TEST(MeanRatio, Examples) {
  std::mt19937_64 rng(6);
  const Image t = oracle::random_image(10, 10, rng);
  EXPECT_DOUBLE_EQ(mean_ratio(t, t), 1.0);
  EXPECT_NEAR(mean_ratio(scale(t, 1.02), t), 1.02, 1e-7);
  EXPECT_NEAR(mean_ratio(scale(t, 2.0), t, Region{2, 2, 3, 3}), 2.0, 1e-7);
  EXPECT_EQ(code_of([&] { mean_ratio(t, t, Region{0, 0, 0, 5}); }), ErrorCode::kDegenerateRegion);
  EXPECT_EQ(code_of([&] { mean_ratio(t, Image::filled(10, 10, 0.0f)); }), ErrorCode::kNonPositiveValue);
}

TEST(ResidualStats, EstimateEqualsNoisy) {
  std::mt19937_64 rng(7);
  const Image w = oracle::random_image(32, 32, rng);
  const auto r = residual_stats(w, w);
  EXPECT_DOUBLE_EQ(r.mean, 1.0);
  EXPECT_FALSE(r.enl.has_value());
}

TEST(ResidualStats, TrueReflectivityRecoversSpeckle) {
  const auto sim = generate_stack(
      SceneScript{generate_scene(EdgeScene{50.0, 200.0, 128}, 256, 256), {}, 1, 4.0}, 17);
  const auto r = residual_stats(sim.stack.images[0], sim.truth[0]);
  EXPECT_GE(r.mean, 0.98);
  EXPECT_LE(r.mean, 1.02);
  ASSERT_TRUE(r.enl);
  EXPECT_GE(*r.enl, 3.6);
  EXPECT_LE(*r.enl, 4.4);
  EXPECT_NEAR(residual_stats(sim.stack.images[0], scale(sim.truth[0], 2.0)).mean, 0.5, 0.01);
}

TEST(LogVariance, Examples) {
  EXPECT_EQ(log_variance(Image::filled(6, 6, 42.0f)), 0.0);
  EXPECT_NEAR(log_variance(Image(2, 1, {float(std::exp(1.0)), float(std::exp(3.0))})), 2.0, 1e-6);
  EXPECT_EQ(code_of([] { log_variance(Image(2, 1, {1.0f, 0.0f})); }), ErrorCode::kNonPositiveValue);
}

TEST(LogVariance, PropertyScaleInvariant) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Image img = oracle::random_image(12, 12, rng);
    const double c = std::exp(std::uniform_real_distribution<double>(-4, 4)(rng));
    EXPECT_NEAR(log_variance(scale(img, c)), log_variance(img), 1e-6);
  }
}

TEST(Report, JsonLines) {
  auto r = make_report("enl", 4.25);
  r.region = Region{1, 2, 3, 4};
  r.params["date"] = "t03";
  const std::string line = to_json_line(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["name"], "enl");
  EXPECT_EQ(j["value"], 4.25);
  EXPECT_EQ(j["region"], nlohmann::json({1, 2, 3, 4}));
  EXPECT_EQ(j["params"]["date"], "t03");
  EXPECT_FALSE(j.contains("flag"));
}

TEST(Report, Flags) {
  const auto undef = nlohmann::json::parse(to_json_line(make_report("enl", std::nullopt)));
  EXPECT_TRUE(undef["value"].is_null());
  EXPECT_EQ(undef["flag"], "undefined");
  const auto inf = nlohmann::json::parse(to_json_line(make_report("psnr", std::numeric_limits<double>::infinity())));
  EXPECT_TRUE(inf["value"].is_null());
  EXPECT_EQ(inf["flag"], "+inf");
}
