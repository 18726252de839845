// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "mtsar/core.hpp"
#include "mtsar/error.hpp"
#include "mtsar/speckle.hpp"
#include "oracles.hpp"

using namespace mtsar;

TEST(SplitMix64, MatchesPublishedOutputs) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ull);
}

TEST(Xoshiro, UniformRange) {
  Xoshiro256 rng(42);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SampleSpeckle, Deterministic) {
  EXPECT_EQ(sample_speckle(4.0, 64, 48, 99), sample_speckle(4.0, 64, 48, 99));
  EXPECT_NE(sample_speckle(4.0, 64, 48, 99), sample_speckle(4.0, 64, 48, 100));
}

TEST(SampleSpeckle, RejectsBadArguments) {
  EXPECT_THROW(sample_speckle(0.0, 4, 4, 1), Error);
  EXPECT_THROW(sample_speckle(-2.0, 4, 4, 1), Error);
  EXPECT_THROW(sample_speckle(4.0, 0, 4, 1), Error);
}

TEST(SampleSpeckle, MomentsL4) {
  const auto u = oracle::as_doubles(sample_speckle(4.0, 512, 512, 2024));
  const double m = oracle::sample_mean(u);
  const double v = oracle::sample_variance(u);
  EXPECT_GE(m, 0.99);
  EXPECT_LE(m, 1.01);
  EXPECT_GE(v, 0.2375);
  EXPECT_LE(v, 0.2625);
}

TEST(SampleSpeckle, MomentsL1) {
  const auto u = oracle::as_doubles(sample_speckle(1.0, 512, 512, 77));
  const double v = oracle::sample_variance(u);
  EXPECT_GE(v, 0.95);
  EXPECT_LE(v, 1.05);
}

// |mean - 1| <= 4 sqrt(1/(L N)) and variance within 5 % of 1/L, over
// several seeds and look counts, including a fractional shape.
TEST(SampleSpeckle, PropertyMoments) {
  const double N = 512.0 * 512.0;
  for (double L : {1.0, 4.0, 10.0, 0.5}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const auto u = oracle::as_doubles(sample_speckle(L, 512, 512, seed));
      const double m = oracle::sample_mean(u);
      const double v = oracle::sample_variance(u);
      EXPECT_LE(std::abs(m - 1.0), 4.0 * std::sqrt(1.0 / (L * N))) << "L=" << L << " seed=" << seed;
      EXPECT_LE(std::abs(v - 1.0 / L), 0.05 / L) << "L=" << L << " seed=" << seed;
      for (double x : u) ASSERT_GT(x, 0.0);
    }
  }
}

TEST(Corrupt, RejectsNonPositiveReflectivity) {
  EXPECT_THROW(corrupt(Image::filled(4, 4, 0.0f), 4.0, 1), Error);
  EXPECT_THROW(corrupt(Image(2, 1, {1.0f, -1.0f}), 4.0, 1), Error);
}

TEST(Corrupt, DividingOutSpeckleRecoversReflectivity) {
  std::mt19937_64 rng(8);
  const Image v = oracle::random_image(32, 32, rng, 1.0f, 1000.0f);
  const Image w = corrupt(v, 4.0, 5);
  const Image u = sample_speckle(4.0, 32, 32, 5);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(double(w[i]) / double(u[i]), v[i], 2e-7 * v[i]);
  }
}

TEST(Corrupt, MeanOfConstantScene) {
  const double m = mean(corrupt(Image::filled(512, 512, 100.0f), 4.0, 31));
  EXPECT_GE(m, 99.0);
  EXPECT_LE(m, 101.0);
}

TEST(Corrupt, PropertyScaleEquivariance) {
  std::mt19937_64 rng(21);
  const Image v = oracle::random_image(40, 30, rng, 1.0f, 100.0f);
  for (double c : {0.001, 0.5, 3.0, 1e4}) {
    const Image lhs = corrupt(scale(v, c), 4.0, 9);
    const Image rhs = scale(corrupt(v, 4.0, 9), c);
    for (std::size_t i = 0; i < v.size(); ++i) ASSERT_NEAR(lhs[i], rhs[i], 4e-7 * std::abs(rhs[i]));
  }
}

TEST(Scene, Constant) {
  const Image s = generate_scene(ConstantScene{100.0}, 64, 64);
  for (float v : s.pixels()) EXPECT_EQ(v, 100.0f);
}

TEST(Scene, Edge) {
  const Image s = generate_scene(EdgeScene{50.0, 200.0, 32}, 64, 64);
  for (std::size_t y = 0; y < 64; ++y) {
    for (std::size_t x = 0; x < 64; ++x) EXPECT_EQ(s.at(x, y), x < 32 ? 50.0f : 200.0f);
  }
}

TEST(Scene, PointTargets) {
  const Image s = generate_scene(PointTargetsScene{50.0, 5000.0, {{10, 10}}}, 64, 64);
  for (std::size_t y = 0; y < 64; ++y) {
    for (std::size_t x = 0; x < 64; ++x) {
      EXPECT_EQ(s.at(x, y), (x == 10 && y == 10) ? 5000.0f : 50.0f);
    }
  }
}

TEST(Scene, Lines) {
  const Image s = generate_scene(LinesScene{50.0, 500.0, {3, 7}}, 8, 10);
  for (std::size_t y = 0; y < 10; ++y) EXPECT_EQ(s.at(4, y), (y == 3 || y == 7) ? 500.0f : 50.0f);
}

TEST(Scene, InvalidParameters) {
  EXPECT_THROW(generate_scene(ConstantScene{0.0}, 4, 4), Error);
  EXPECT_THROW(generate_scene(EdgeScene{50.0, -1.0, 2}, 4, 4), Error);
  EXPECT_THROW(generate_scene(EdgeScene{50.0, 100.0, 5}, 4, 4), Error);
  EXPECT_THROW(generate_scene(PointTargetsScene{50.0, 100.0, {{4, 0}}}, 4, 4), Error);
  EXPECT_THROW(generate_scene(LinesScene{50.0, 100.0, {9}}, 4, 4), Error);
}

TEST(Scene, ParseCompactForms) {
  EXPECT_EQ(generate_scene(parse_scene_kind("constant:100"), 4, 4), Image::filled(4, 4, 100.0f));
  EXPECT_EQ(generate_scene(parse_scene_kind("edge:50,200,2"), 4, 4),
            generate_scene(EdgeScene{50.0, 200.0, 2}, 4, 4));
  EXPECT_EQ(generate_scene(parse_scene_kind("points:50,5000,1/2;3/3"), 4, 4),
            generate_scene(PointTargetsScene{50.0, 5000.0, {{1, 2}, {3, 3}}}, 4, 4));
  EXPECT_EQ(generate_scene(parse_scene_kind("lines:50,500,0;2"), 4, 4),
            generate_scene(LinesScene{50.0, 500.0, {0, 2}}, 4, 4));
  EXPECT_THROW(parse_scene_kind("blob:1"), Error);
  EXPECT_THROW(parse_scene_kind("edge:1,2"), Error);
  EXPECT_THROW(parse_scene_kind("constant:abc"), Error);
}

TEST(GenerateStack, NoEventsMeansStaticTruth) {
  SceneScript script{Image::filled(8, 8, 50.0f), {}, 3, 4.0};
  const auto sim = generate_stack(script, 1);
  ASSERT_EQ(sim.truth.size(), 3u);
  for (const auto& v : sim.truth) EXPECT_EQ(v, script.base);
}

TEST(GenerateStack, CumulativeEvents) {
  const Region R{2, 2, 3, 3};
  SceneScript script{Image::filled(8, 8, 50.0f), {{1, R, 500.0}}, 3, 4.0};
  const auto sim = generate_stack(script, 1);
  EXPECT_EQ(sim.truth[0], script.base);
  for (std::size_t t : {1u, 2u}) {
    for (std::size_t y = 0; y < 8; ++y) {
      for (std::size_t x = 0; x < 8; ++x) {
        const bool inside = x >= 2 && x < 5 && y >= 2 && y < 5;
        EXPECT_EQ(sim.truth[t].at(x, y), inside ? 500.0f : 50.0f);
      }
    }
  }
}

TEST(GenerateStack, ValidAndNormalised) {
  SceneScript script{generate_scene(EdgeScene{50.0, 200.0, 128}, 256, 256), {}, 5, 4.0};
  const auto sim = generate_stack(script, 17);
  EXPECT_NO_THROW(validate_stack(sim.stack));
  for (std::size_t t = 0; t < sim.stack.size(); ++t) {
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < sim.truth[t].size(); ++i) {
      ratio_sum += double(sim.stack.images[t][i]) / sim.truth[t][i];
    }
    const double m = ratio_sum / double(sim.truth[t].size());
    EXPECT_NEAR(m, 1.0, 0.02) << "date " << t;
  }
}

TEST(GenerateStack, DeterministicAndDistinctDates) {
  SceneScript script{Image::filled(16, 16, 10.0f), {}, 4, 4.0};
  const auto a = generate_stack(script, 5);
  const auto b = generate_stack(script, 5);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(a.stack.images[t], b.stack.images[t]);
  EXPECT_NE(a.stack.images[0], a.stack.images[1]);
  EXPECT_EQ(a.stack.dates[3], "t03");
}

TEST(GenerateStack, InvalidScript) {
  SceneScript bad_date{Image::filled(4, 4, 1.0f), {{3, Region{0, 0, 1, 1}, 2.0}}, 3, 4.0};
  EXPECT_THROW(generate_stack(bad_date, 0), Error);
  SceneScript bad_value{Image::filled(4, 4, 1.0f), {{0, Region{0, 0, 1, 1}, 0.0}}, 3, 4.0};
  EXPECT_THROW(generate_stack(bad_value, 0), Error);
  SceneScript bad_region{Image::filled(4, 4, 1.0f), {{0, Region{3, 3, 2, 2}, 2.0}}, 3, 4.0};
  EXPECT_THROW(generate_stack(bad_region, 0), Error);
}
