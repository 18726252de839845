// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, each checked at its
// stated tolerance and runtime budget. Exit status is nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mtsar/core.hpp"
#include "mtsar/despeckle.hpp"
#include "mtsar/error.hpp"
#include "mtsar/io.hpp"
#include "mtsar/metrics.hpp"
#include "mtsar/multitemporal.hpp"
#include "mtsar/speckle.hpp"
#include "oracles.hpp"

using namespace mtsar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SimulatedStack static_stack(double level, std::size_t size, std::size_t T, double L, std::uint64_t seed) {
  return generate_stack(SceneScript{Image::filled(size, size, float(level)), {}, T, L}, seed);
}

Outcome speckle_moments() {
  Outcome o;
  for (double L : {1.0, 4.0}) {
    const auto v = oracle::as_doubles(sample_speckle(L, 512, 512, 1000 + std::uint64_t(L)));
    const double m = oracle::sample_mean(v), var = oracle::sample_variance(v);
    const bool ok = std::abs(m - 1.0) <= 0.01 && std::abs(var - 1.0 / L) <= 0.05 / L;
    o.ok = o.ok && ok;
    o.detail += fmt("L=%g mean=%.4f var=%.4f (1/L=%.4f); ", L, m, var, 1.0 / L);
  }
  return o;
}

Outcome quegan_oracle_equivalence() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Stack s;
    s.looks = 4.0;
    std::vector<Image> pre;
    for (int t = 0; t < 5; ++t) {
      s.images.push_back(oracle::random_image(16, 16, rng, 0.0f, 100.0f));
      s.dates.push_back("d" + std::to_string(t));
      pre.push_back(oracle::random_image(16, 16, rng, 0.0f, 100.0f));
    }
    const std::size_t t = rng() % 5;
    const Image fast = quegan(s, pre, t);
    const auto ref = oracle::naive_quegan(s.images, pre, t, 1e-6);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max(worst, std::abs(fast[i] - ref[i]) / std::max(std::abs(ref[i]), 1e-30));
    }
  }
  // f32 output rounding: half an ulp, with one ulp of slack.
  const double tol = std::numeric_limits<float>::epsilon();
  return {worst <= tol, fmt("worst relative deviation %.3g (tolerance %.3g)", worst, tol)};
}

Outcome rabasar_identity_law() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto sim = generate_stack(
        SceneScript{generate_scene(EdgeScene{50.0, 200.0, 32}, 64, 64), {{4, Region{0, 0, 16, 16}, 900.0}}, 9, 4.0},
        rng());
    const Image s = super_image(sim.stack);
    const double floor = EpsilonPolicy{}.floor_for(s);
    for (std::size_t t = 0; t < 9; ++t) {
      const Image& w = sim.stack.images[t];
      const Image r = rabasar(w, s, IdentitySpec{});
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(s[i] > floor) || w[i] == 0.0f) continue;
        worst = std::max(worst, std::abs(double(r[i]) - w[i]) / w[i]);
        ++checked;
      }
    }
  }
  return {worst <= 1e-6, fmt("worst relative error %.3g over %zu pixels", worst, checked)};
}

Outcome super_image_enl() {
  const auto sim = static_stack(100.0, 256, 17, 4.0, 4);
  const auto e = enl(super_image(sim.stack));
  const bool ok = e && *e >= 55.0 && *e <= 82.0;
  return {ok, e ? fmt("ENL(s)=%.2f, band [55, 82]", *e) : std::string("ENL undefined")};
}

Outcome oracle_quegan_static() {
  const auto sim = static_stack(100.0, 256, 17, 4.0, 5);
  Outcome o;
  for (std::size_t t : {0u, 8u, 16u}) {
    const Image q = quegan(sim.stack, sim.truth, t);
    const double mr = mean_ratio(q, sim.truth[t]);
    const auto e = enl(q);
    const bool ok = mr >= 0.99 && mr <= 1.01 && e && *e >= 54.0 && *e <= 82.0;
    o.ok = o.ok && ok;
    o.detail += fmt("t=%zu mean_ratio=%.4f ENL=%.2f; ", t, mr, e ? *e : NAN);
  }
  return o;
}

Outcome pre_estimator_ordering() {
  int wins = 0;
  double box_sum = 0.0, ora_sum = 0.0;
  const Region band{124, 0, 8, 256};
  const Image base = generate_scene(EdgeScene{50.0, 200.0, 128}, 256, 256);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sim = generate_stack(SceneScript{base, {}, 17, 4.0}, 600 + seed);
    const Image box = quegan_with_despeckler(sim.stack, BoxcarSpec{7}, 0);
    const Image ora = quegan(sim.stack, sim.truth, 0);
    const double mb = mse(crop(box, band), crop(sim.truth[0], band));
    const double mo = mse(crop(ora, band), crop(sim.truth[0], band));
    box_sum += mb;
    ora_sum += mo;
    wins += mb > mo;
  }
  return {wins == 10, fmt("%d/10 seeds; mean band MSE boxcar=%.1f oracle=%.1f", wins, box_sum / 10, ora_sum / 10)};
}

Outcome ratio_stationarity() {
  int seeds_ok = 0;
  const Image base = generate_scene(EdgeScene{50.0, 200.0, 128}, 256, 256);
  double worst_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sim = generate_stack(SceneScript{base, {}, 17, 4.0}, 700 + seed);
    const Image s = super_image(sim.stack);
    bool all = true;
    for (std::size_t t = 0; t < 17; ++t) {
      const double lt = log_variance(ratio_image(sim.stack.images[t], s));
      const double lw = log_variance(sim.stack.images[t]);
      worst_gap = std::min(worst_gap, lw - lt);
      all = all && lt < lw;
    }
    seeds_ok += all;
  }
  return {seeds_ok == 10, fmt("%d/10 seeds; smallest var(log w) - var(log tau) = %.4f", seeds_ok, worst_gap)};
}

Outcome change_preservation() {
  const Region R{96, 96, 64, 64};
  const auto sim = generate_stack(SceneScript{Image::filled(256, 256, 50.0f), {{9, R, 500.0}}, 17, 4.0}, 8);
  const Image naive = super_image(sim.stack);
  double worst_q = 0.0, least_naive = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < 17; ++t) {
    const double truth = mean(sim.truth[t], R);
    worst_q = std::max(worst_q, std::abs(mean(quegan(sim.stack, sim.truth, t), R) / truth - 1.0));
    if (t < 9) least_naive = std::min(least_naive, std::abs(mean(naive, R) / truth - 1.0));
  }
  return {worst_q <= 0.05 && least_naive > 0.30,
          fmt("oracle Quegan worst error %.2f%%; naive mean least pre-change error %.1f%%", 100 * worst_q,
              100 * least_naive)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + MTSAR_CLI_PATH + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome incremental_super_image() {
  const auto sim = static_stack(100.0, 128, 17, 4.0, 9);
  const Image batch = super_image(sim.stack);
  auto worst_rel = [&](const Image& a) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(double(a[i]) - batch[i]) / batch[i]);
    return w;
  };

  SuperImageAccumulator acc(128, 128);
  for (const auto& img : sim.stack.images) acc.update(img);
  const double in_memory = worst_rel(acc.current());

  oracle::ScratchDir dir("accept9");
  for (std::size_t t = 0; t < 17; ++t) write_image(sim.stack.images[t], dir.path / fmt("w%02zu.sarr", t));
  const auto state = dir.path / "state.sarr";
  auto adds = [&](std::size_t from, std::size_t to) {
    std::string a;
    for (std::size_t t = from; t < to; ++t) a += " --add '" + (dir.path / fmt("w%02zu.sarr", t)).string() + "'";
    return a;
  };
  const std::string st = " --incremental-state '" + state.string() + "'";
  const int rc1 = run_cli("superimage" + st + adds(0, 6));
  const int rc2 = run_cli("superimage" + st + adds(6, 12));
  const int rc3 = run_cli("superimage" + st + adds(12, 17) + " --out '" + (dir.path / "s.sarr").string() + "'");
  if (rc1 || rc2 || rc3) return {false, fmt("CLI exit codes %d %d %d", rc1, rc2, rc3)};
  const double via_cli = worst_rel(read_image(dir.path / "s.sarr"));
  return {in_memory <= 1e-5 && via_cli <= 1e-5,
          fmt("worst relative deviation: in-memory %.3g, CLI state round-trip %.3g", in_memory, via_cli)};
}

Outcome rabasar_vs_single_image() {
  int seeds_ok = 0;
  double enl_r = 0.0, enl_b = 0.0, mr_lo = 10.0, mr_hi = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sim = static_stack(100.0, 256, 17, 4.0, 1000 + seed);
    const Image& w = sim.stack.images[0];
    const Image r = rabasar(w, super_image(sim.stack), BoxcarSpec{7});
    const Image b = boxcar(w, 7);
    const double er = enl(r).value_or(0.0), eb = enl(b).value_or(0.0);
    const double mr = mean_ratio(r, sim.truth[0]);
    enl_r += er / 10;
    enl_b += eb / 10;
    mr_lo = std::min(mr_lo, mr);
    mr_hi = std::max(mr_hi, mr);
    seeds_ok += er > eb && mr >= 0.97 && mr <= 1.03;
  }
  return {seeds_ok == 10, fmt("%d/10 seeds; mean ENL rabasar=%.1f boxcar(7)=%.1f; mean_ratio in [%.4f, %.4f]", seeds_ok,
                              enl_r, enl_b, mr_lo, mr_hi)};
}

Outcome format_and_protocol() {
  Outcome o;
  std::mt19937_64 rng(11);
  const Image img = oracle::random_image(33, 21, rng, 1e-3f, 1e5f);
  oracle::ScratchDir dir("accept11");
  write_image(img, dir.path / "a.sarr");
  const Image back = read_image(dir.path / "a.sarr");
  const bool exact = back.same_shape(img) &&
                     std::memcmp(back.pixels().data(), img.pixels().data(), img.size() * sizeof(float)) == 0;
  o.ok = exact;
  o.detail += exact ? "round-trip bit-exact; " : "round-trip differs; ";

  const Image echoed = external_invoke(img, {MTSAR_ECHO_PLUGIN}, 30.0, 4.0);
  const bool identity = echoed == img;
  o.ok = o.ok && identity;
  o.detail += identity ? "echo plugin identity; " : "echo plugin altered the image; ";

  const auto good = encode_sarr(img);
  struct Corruption {
    const char* name;
    ErrorCode expected;
    std::function<void(std::vector<std::uint8_t>&)> apply;
  };
  const std::vector<Corruption> classes{
      {"bad-magic", ErrorCode::kBadMagic, [](auto& b) { b[0] = 'X'; }},
      {"unsupported-version", ErrorCode::kUnsupportedVersion, [](auto& b) { b[4] = 7; }},
      {"truncated-payload", ErrorCode::kTruncatedPayload, [](auto& b) { b.resize(b.size() - 4); }},
      {"non-finite", ErrorCode::kNonFinite,
       [](auto& b) {
         const float inf = std::numeric_limits<float>::infinity();
         std::memcpy(b.data() + kSarrHeaderSize + 8, &inf, 4);
       }},
  };
  int rejected = 0;
  for (const auto& c : classes) {
    auto bytes = good;
    c.apply(bytes);
    try {
      decode_sarr(bytes);
    } catch (const Error& e) {
      rejected += e.code() == c.expected;
    }
  }
  o.ok = o.ok && rejected == 4;
  o.detail += fmt("%d/4 corruption classes rejected", rejected);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "speckle moments", 2.0, speckle_moments},
      {2, "quegan matches naive loop", 1.0, quegan_oracle_equivalence},
      {3, "rabasar identity law", 1.0, rabasar_identity_law},
      {4, "super-image ENL", 5.0, super_image_enl},
      {5, "oracle quegan on static scene", 10.0, oracle_quegan_static},
      {6, "pre-estimator quality ordering", 30.0, pre_estimator_ordering},
      {7, "ratio stationarity", 10.0, ratio_stationarity},
      {8, "change preservation", 10.0, change_preservation},
      {9, "incremental super-image", 5.0, incremental_super_image},
      {10, "rabasar vs single-image boxcar", 30.0, rabasar_vs_single_image},
      {11, "format and plugin protocol", 1.0, format_and_protocol},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.ok && in_time;
    failures += !pass;
    std::printf("criterion %2d %s: %s | %s | %.2f s (limit %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.title,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
