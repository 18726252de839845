// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

// mtsar command-line front end. Talks to the library only through the C
// API in mtsar/mtsar.h.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtsar/mtsar.h"

namespace fs = std::filesystem;

namespace {

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<mtsar_image, Deleter<mtsar_image, mtsar_image_free>>;
using StackPtr = std::unique_ptr<mtsar_stack, Deleter<mtsar_stack, mtsar_stack_free>>;
using ListPtr = std::unique_ptr<mtsar_image_list, Deleter<mtsar_image_list, mtsar_image_list_free>>;
using DespecklerPtr =
    std::unique_ptr<mtsar_despeckler, Deleter<mtsar_despeckler, mtsar_despeckler_free>>;
using AccumulatorPtr =
    std::unique_ptr<mtsar_accumulator, Deleter<mtsar_accumulator, mtsar_accumulator_free>>;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(mtsar_status st, const std::string& context) {
  if (st != MTSAR_OK) {
    throw DataError(context + ": " + mtsar_status_string(st) + ": " + mtsar_last_error());
  }
}

ImagePtr read_image(const std::string& path) {
  mtsar_image* img = nullptr;
  check(mtsar_image_read(path.c_str(), &img), "reading " + path);
  return ImagePtr(img);
}

void write_image(const mtsar_image* img, const fs::path& path) {
  check(mtsar_image_write(img, path.c_str()), "writing " + path.string());
}

StackPtr read_stack(const std::string& manifest) {
  mtsar_stack* stack = nullptr;
  check(mtsar_stack_read_manifest(manifest.c_str(), &stack), "loading " + manifest);
  return StackPtr(stack);
}

ImagePtr stack_image(const mtsar_stack* stack, std::size_t t) {
  mtsar_image* img = nullptr;
  check(mtsar_stack_image(stack, t, &img), "stack date");
  return ImagePtr(img);
}

DespecklerPtr make_despeckler(const std::string& spec, double timeout) {
  mtsar_despeckler* d = nullptr;
  if (const auto st = mtsar_despeckler_create(spec.c_str(), timeout, &d); st != MTSAR_OK) {
    throw UsageError("despeckler '" + spec + "': " + mtsar_last_error());
  }
  DespecklerPtr out(d);
  // External plugins must pass the capability handshake before any work.
  if (spec.rfind("external:", 0) == 0) {
    char* caps = nullptr;
    check(mtsar_despeckler_caps(out.get(), &caps), "plugin handshake for '" + spec + "'");
    std::cerr << "mtsar: plugin " << caps << '\n';
    mtsar_string_free(caps);
  }
  return out;
}

// Resolves --date: a label from the manifest, a numeric index, or "all".
std::vector<std::size_t> select_dates(const mtsar_stack* stack, const std::string& date) {
  const std::size_t T = mtsar_stack_size(stack);
  std::vector<std::size_t> out;
  if (date == "all") {
    for (std::size_t t = 0; t < T; ++t) out.push_back(t);
    return out;
  }
  std::size_t index = 0;
  if (mtsar_stack_find_date(stack, date.c_str(), &index) == MTSAR_OK) return {index};
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(date, &used);
    if (used == date.size() && v < T) return {static_cast<std::size_t>(v)};
  } catch (const std::exception&) {
  }
  throw UsageError("--date '" + date + "' is neither 'all', a date label, nor an index below " +
                   std::to_string(T));
}

// Single date: --out is the product path. All dates: --out is a directory
// receiving <date>.sarr.
fs::path output_path(const std::string& out, const mtsar_stack* stack, std::size_t t, bool all) {
  if (!all) return out;
  return fs::path(out) / (std::string(mtsar_stack_date(stack, t)) + ".sarr");
}

template <typename Fn>
void for_dates(const std::vector<std::size_t>& dates, std::size_t jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, dates.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::optional<std::string> first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < dates.size(); i = next++) {
      try {
        fn(dates[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        if (!first_error) first_error = e.what();
        next = dates.size();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (first_error) throw DataError(*first_error);
}

void prepare_output(const std::string& out, bool all) {
  std::error_code ec;
  const fs::path dir = all ? fs::path(out) : fs::path(out).parent_path();
  if (!dir.empty()) fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
}

std::pair<std::uint64_t, std::uint64_t> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x != std::string::npos) {
      std::size_t a = 0;
      std::size_t b = 0;
      const auto w = std::stoull(text.substr(0, x), &a);
      const auto h = std::stoull(text.substr(x + 1), &b);
      if (a == x && b == text.size() - x - 1 && w > 0 && h > 0) return {w, h};
    }
  } catch (const std::exception&) {
  }
  throw UsageError("--size must look like WIDTHxHEIGHT, got '" + text + "'");
}

std::vector<std::uint64_t> parse_uints(const std::string& text, std::size_t n, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad integer '" + item + "'");
    }
  }
  if (out.size() != n) throw UsageError(std::string(what) + ": expected " + std::to_string(n) + " values");
  return out;
}

// "T:x0,y0,w,h:value"
nlohmann::json parse_event(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.rfind(':');
  if (a == std::string::npos || a == b) throw UsageError("--event must be T:x0,y0,w,h:value");
  try {
    const auto r = parse_uints(text.substr(a + 1, b - a - 1), 4, "--event region");
    return {{"date", std::stoull(text.substr(0, a))},
            {"region", r},
            {"value", std::stod(text.substr(b + 1))}};
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("--event must be T:x0,y0,w,h:value, got '" + text + "'");
  }
}

struct Common {
  std::string manifest;
  std::string date = "all";
  std::string out;
  double eps_rel = 1e-6;
  double timeout = 300.0;
  std::size_t jobs = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_date) {
  cmd->add_option("--manifest", c.manifest, "Stack manifest (JSON)")->required();
  if (with_date) {
    cmd->add_option("--date", c.date, "Date label, index, or 'all'")->capture_default_str();
  }
  cmd->add_option("--out", c.out, "Output .sarr (or directory with --date all)")->required();
  cmd->add_option("--eps", c.eps_rel, "Relative division floor (x mean of denominator)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--timeout", c.timeout, "Per-image plugin timeout in seconds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", c.jobs, "Parallel workers (0 = all processors)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-temporal SAR speckle filtering (Quegan and RABASAR)", "mtsar"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mtsar_version());

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic speckled stack with ground truth");
  std::string scene;
  std::string script_path;
  std::string size = "256x256";
  std::uint64_t dates = 17;
  double looks = 4.0;
  std::uint64_t seed = 0;
  std::vector<std::string> events;
  std::string sim_out;
  auto* scene_opt = sim->add_option(
      "--scene", scene, "constant:L | edge:L,R,COL | points:BG,TGT,X/Y;.. | lines:BG,LVL,ROW;..");
  auto* script_opt = sim->add_option("--script", script_path, "Scene script JSON file");
  scene_opt->excludes(script_opt);
  sim->add_option("--size", size, "WIDTHxHEIGHT")->capture_default_str()->excludes(script_opt);
  sim->add_option("--dates", dates, "Number of dates")->capture_default_str()->excludes(script_opt);
  sim->add_option("--looks", looks, "Nominal looks L")->capture_default_str()->excludes(script_opt);
  sim->add_option("--event", events, "Change event T:x0,y0,w,h:value (repeatable)")->excludes(script_opt);
  sim->add_option("--seed", seed, "Master seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output directory")->required();

  // superimage
  auto* sup = app.add_subcommand("superimage", "Temporal mean of a stack, batch or incremental");
  std::string sup_manifest;
  std::vector<std::string> sup_add;
  std::string sup_state;
  std::string sup_out;
  sup->add_option("--manifest", sup_manifest, "Stack manifest (JSON)");
  sup->add_option("--add", sup_add, "Extra .sarr dates to absorb (repeatable)");
  sup->add_option("--incremental-state", sup_state,
                  "Running-sum state .sarr (+ .json sidecar); created if absent, updated in place");
  sup->add_option("--out", sup_out, "Super-image output .sarr");

  // ratio
  auto* rat = app.add_subcommand("ratio", "Ratio image w_t / s");
  Common rat_c;
  std::string rat_super;
  add_common(rat, rat_c, true);
  rat->add_option("--super", rat_super, "Precomputed super-image (default: from the manifest)");

  // despeckle
  auto* dsp = app.add_subcommand("despeckle", "Single-image despeckling");
  std::string dsp_in;
  std::string dsp_out;
  std::string dsp_spec;
  double dsp_looks = 0.0;
  double dsp_timeout = 300.0;
  dsp->add_option("--input", dsp_in, "Input .sarr")->required();
  dsp->add_option("--out", dsp_out, "Output .sarr")->required();
  dsp->add_option("--despeckler", dsp_spec, "identity | boxcar:K | external:CMD")->required();
  dsp->add_option("--looks", dsp_looks, "Nominal looks forwarded as MTSAR_LOOKS (0 = unset)");
  dsp->add_option("--timeout", dsp_timeout, "Plugin timeout in seconds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // quegan
  auto* que = app.add_subcommand("quegan", "Change-compensated temporal averaging");
  Common que_c;
  std::string que_spec = "boxcar:7";
  add_common(que, que_c, true);
  que->add_option("--despeckler", que_spec, "Pre-estimator: identity | boxcar:K | external:CMD")
      ->capture_default_str();

  // rabasar
  auto* rab = app.add_subcommand("rabasar", "Ratio-based filtering against the super-image");
  Common rab_c;
  std::string rab_ratio = "boxcar:7";
  std::string rab_super_spec = "boxcar:7";
  std::string rab_super;
  bool denoise_super = false;
  add_common(rab, rab_c, true);
  rab->add_option("--ratio-despeckler", rab_ratio, "Ratio-image denoiser")->capture_default_str();
  rab->add_flag("--denoise-super", denoise_super, "Despeckle the super-image before use");
  rab->add_option("--super-despeckler", rab_super_spec, "Super-image denoiser for --denoise-super")
      ->capture_default_str();
  rab->add_option("--super", rab_super, "Precomputed super-image (default: from the manifest)");

  // metrics
  auto* met = app.add_subcommand("metrics", "Quality metrics as JSON Lines on stdout");
  std::string met_est;
  std::string met_truth;
  std::string met_noisy;
  std::string met_region;
  std::string met_label;
  double met_eps = 1e-6;
  met->add_option("--estimate", met_est, "Image to evaluate")->required();
  met->add_option("--truth", met_truth, "Ground-truth reflectivity");
  met->add_option("--noisy", met_noisy, "Noisy input, for residual statistics");
  met->add_option("--region", met_region, "x0,y0,w,h (default: full frame)");
  met->add_option("--label", met_label, "Label attached to every report line");
  met->add_option("--eps", met_eps, "Relative division floor")->capture_default_str()->check(CLI::PositiveNumber);

  // quicklook
  auto* qlk = app.add_subcommand("quicklook", "8-bit dB-scaled PNG rendering");
  std::string qlk_in;
  std::string qlk_out;
  double lo_db = -5.0;
  double hi_db = 30.0;
  qlk->add_option("--input", qlk_in, "Input .sarr")->required();
  qlk->add_option("--out", qlk_out, "Output .png")->required();
  qlk->add_option("--lo", lo_db, "dB mapped to black")->capture_default_str();
  qlk->add_option("--hi", hi_db, "dB mapped to white")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) {
      nlohmann::json script;
      if (!script_path.empty()) {
        std::ifstream in(script_path);
        if (!in) throw DataError("cannot open '" + script_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        const auto base = fs::path(script_path).parent_path().string();
        check(mtsar_simulate(buf.str().c_str(), seed, sim_out.c_str(), base.empty() ? "." : base.c_str()),
              "simulate");
        return 0;
      }
      if (scene.empty()) throw UsageError("simulate needs --scene or --script");
      const auto [w, h] = parse_size(size);
      script = {{"scene", scene}, {"width", w}, {"height", h}, {"dates", dates}, {"looks", looks}};
      script["events"] = nlohmann::json::array();
      for (const auto& ev : events) script["events"].push_back(parse_event(ev));
      if (const auto st = mtsar_simulate(script.dump().c_str(), seed, sim_out.c_str(), nullptr);
          st == MTSAR_ERR_INVALID_ARGUMENT || st == MTSAR_ERR_SCHEMA) {
        throw UsageError(std::string("simulate: ") + mtsar_last_error());
      } else {
        check(st, "simulate");
      }
      return 0;
    }

    if (*sup) {
      if (sup_manifest.empty() && sup_add.empty()) {
        throw UsageError("superimage needs --manifest and/or --add");
      }
      if (sup_state.empty() && sup_out.empty()) {
        throw UsageError("superimage needs --out and/or --incremental-state");
      }
      std::vector<ImagePtr> inputs;
      if (!sup_manifest.empty()) {
        auto stack = read_stack(sup_manifest);
        for (std::size_t t = 0; t < mtsar_stack_size(stack.get()); ++t) {
          inputs.push_back(stack_image(stack.get(), t));
        }
      }
      for (const auto& p : sup_add) inputs.push_back(read_image(p));

      AccumulatorPtr acc;
      mtsar_accumulator* raw = nullptr;
      if (!sup_state.empty() && fs::exists(sup_state)) {
        check(mtsar_accumulator_load(sup_state.c_str(), nullptr, &raw), "loading state " + sup_state);
      } else {
        check(mtsar_accumulator_create(mtsar_image_width(inputs.front().get()),
                                       mtsar_image_height(inputs.front().get()), &raw),
              "creating accumulator");
      }
      acc.reset(raw);
      for (const auto& img : inputs) check(mtsar_accumulator_update(acc.get(), img.get()), "absorbing date");
      if (!sup_state.empty()) {
        prepare_output(sup_state, false);
        check(mtsar_accumulator_save(acc.get(), sup_state.c_str(), nullptr), "saving state " + sup_state);
      }
      std::cerr << "mtsar: super-image over " << mtsar_accumulator_count(acc.get()) << " dates\n";
      if (!sup_out.empty()) {
        mtsar_image* s = nullptr;
        check(mtsar_accumulator_current(acc.get(), &s), "super-image");
        ImagePtr sp(s);
        prepare_output(sup_out, false);
        write_image(sp.get(), sup_out);
      }
      return 0;
    }

    if (*dsp) {
      auto d = make_despeckler(dsp_spec, dsp_timeout);
      auto in = read_image(dsp_in);
      mtsar_image* out = nullptr;
      check(mtsar_despeckle(d.get(), in.get(), dsp_looks, &out), "despeckle");
      ImagePtr op(out);
      prepare_output(dsp_out, false);
      write_image(op.get(), dsp_out);
      return 0;
    }

    if (*met) {
      auto est = read_image(met_est);
      ImagePtr truth = met_truth.empty() ? nullptr : read_image(met_truth);
      ImagePtr noisy = met_noisy.empty() ? nullptr : read_image(met_noisy);
      std::optional<mtsar_region> region;
      if (!met_region.empty()) {
        const auto r = parse_uints(met_region, 4, "--region");
        region = mtsar_region{r[0], r[1], r[2], r[3]};
      }
      char* lines = nullptr;
      check(mtsar_metrics_report(est.get(), truth.get(), noisy.get(), region ? &*region : nullptr, met_eps,
                                 met_label.empty() ? nullptr : met_label.c_str(), &lines),
            "metrics");
      std::cout << lines;
      mtsar_string_free(lines);
      return 0;
    }

    if (*qlk) {
      if (!(lo_db < hi_db)) throw UsageError("quicklook needs --lo < --hi");
      auto in = read_image(qlk_in);
      prepare_output(qlk_out, false);
      check(mtsar_quicklook_export(in.get(), qlk_out.c_str(), lo_db, hi_db), "quicklook");
      return 0;
    }

    // Per-date products: ratio, quegan, rabasar.
    Common& c = *rat ? rat_c : (*que ? que_c : rab_c);
    DespecklerPtr pre_d;
    DespecklerPtr ratio_d;
    DespecklerPtr super_d;
    if (*que) pre_d = make_despeckler(que_spec, c.timeout);
    if (*rab) {
      ratio_d = make_despeckler(rab_ratio, c.timeout);
      if (denoise_super) super_d = make_despeckler(rab_super_spec, c.timeout);
    }
    auto stack = read_stack(c.manifest);
    const auto selected = select_dates(stack.get(), c.date);
    const bool all = c.date == "all";
    prepare_output(c.out, all);
    const double L = mtsar_stack_looks(stack.get());

    if (*que) {
      mtsar_image_list* pre = nullptr;
      check(mtsar_preestimates_compute(stack.get(), pre_d.get(), c.jobs, &pre), "pre-estimation");
      ListPtr pre_p(pre);
      for_dates(selected, c.jobs, [&](std::size_t t) {
        mtsar_image* out = nullptr;
        check(mtsar_quegan(stack.get(), pre_p.get(), t, c.eps_rel, &out), "quegan");
        ImagePtr op(out);
        write_image(op.get(), output_path(c.out, stack.get(), t, all));
      });
      return 0;
    }

    const std::string& super_path = *rat ? rat_super : rab_super;
    ImagePtr s;
    if (!super_path.empty()) {
      s = read_image(super_path);
    } else {
      mtsar_image* raw = nullptr;
      check(mtsar_super_image(stack.get(), &raw), "super-image");
      s.reset(raw);
    }
    if (super_d) {
      mtsar_image* raw = nullptr;
      check(mtsar_despeckle(super_d.get(), s.get(), L, &raw), "super-image despeckling");
      s.reset(raw);
    }
    for_dates(selected, c.jobs, [&](std::size_t t) {
      auto w = stack_image(stack.get(), t);
      mtsar_image* out = nullptr;
      if (*rat) {
        check(mtsar_ratio_image(w.get(), s.get(), c.eps_rel, &out), "ratio");
      } else {
        check(mtsar_rabasar(w.get(), s.get(), ratio_d.get(), L, c.eps_rel, &out), "rabasar");
      }
      ImagePtr op(out);
      write_image(op.get(), output_path(c.out, stack.get(), t, all));
    });
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "mtsar: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mtsar: " << e.what() << '\n';
    return 1;
  }
}
