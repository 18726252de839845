// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/mtsar.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "mtsar/despeckle.hpp"
#include "mtsar/error.hpp"
#include "mtsar/io.hpp"
#include "mtsar/manifest.hpp"
#include "mtsar/metrics.hpp"
#include "mtsar/multitemporal.hpp"
#include "mtsar/parallel.hpp"
#include "mtsar/speckle.hpp"

struct mtsar_image {
  mtsar::Image image;
};

struct mtsar_stack {
  mtsar::Stack stack;
  std::vector<mtsar::Image> truth;
};

struct mtsar_image_list {
  std::vector<mtsar::Image> images;
};

struct mtsar_despeckler {
  mtsar::DespecklerSpec spec;
  std::string description;
};

struct mtsar_accumulator {
  mtsar::SuperImageAccumulator acc;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
mtsar_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return MTSAR_OK;
  } catch (const mtsar::Error& e) {
    g_last_error = e.what();
    return static_cast<mtsar_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return MTSAR_ERR_INTERNAL;
}

template <typename T>
const T& deref(const T* p, const char* what) {
  if (p == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  return *p;
}

template <typename T>
T** out_param(T** p) {
  if (p == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output pointer is NULL");
  return p;
}

const char* cstr(const char* s, const char* what) {
  if (s == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  return s;
}

void emit(mtsar_image** out, mtsar::Image img) { *out = new mtsar_image{std::move(img)}; }

mtsar::EpsilonPolicy policy_of(double eps_rel) {
  mtsar::EpsilonPolicy p{eps_rel};
  mtsar::validate_policy(p);
  return p;
}

mtsar::Region region_of(const mtsar_region* r, const mtsar::Image& image) {
  if (r == nullptr) return mtsar::Region::full(image);
  return {static_cast<std::size_t>(r->x0), static_cast<std::size_t>(r->y0),
          static_cast<std::size_t>(r->w), static_cast<std::size_t>(r->h)};
}

std::optional<double> looks_of(double looks) {
  if (looks > 0.0 && std::isfinite(looks)) return looks;
  return std::nullopt;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* mtsar_version(void) { return "0.1.0"; }

const char* mtsar_status_string(mtsar_status status) {
  if (status == MTSAR_OK) return "ok";
  // Names are string literals, so data() is NUL-terminated.
  return mtsar::to_string(static_cast<mtsar::ErrorCode>(status)).data();
}

const char* mtsar_last_error(void) { return g_last_error.c_str(); }

void mtsar_string_free(char* str) { std::free(str); }

mtsar_status mtsar_image_create(uint64_t width, uint64_t height, const float* pixels,
                                mtsar_image** out) {
  return guarded([&] {
    out_param(out);
    const auto n = static_cast<std::size_t>(width * height);
    if (pixels == nullptr && n > 0) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "pixels is NULL");
    std::vector<float> px(pixels, pixels + n);
    emit(out, mtsar::Image(width, height, std::move(px)));
  });
}

void mtsar_image_free(mtsar_image* image) { delete image; }
uint64_t mtsar_image_width(const mtsar_image* image) { return image ? image->image.width() : 0; }
uint64_t mtsar_image_height(const mtsar_image* image) { return image ? image->image.height() : 0; }
const float* mtsar_image_data(const mtsar_image* image) {
  return image ? image->image.pixels().data() : nullptr;
}

mtsar_status mtsar_image_read(const char* path, mtsar_image** out) {
  return guarded([&] { emit(out_param(out), mtsar::read_image(cstr(path, "path"))); });
}

mtsar_status mtsar_image_write(const mtsar_image* image, const char* path) {
  return guarded([&] { mtsar::write_image(deref(image, "image").image, cstr(path, "path")); });
}

mtsar_status mtsar_image_crop(const mtsar_image* image, const mtsar_region* region, mtsar_image** out) {
  return guarded([&] {
    const auto& img = deref(image, "image").image;
    emit(out_param(out), mtsar::crop(img, region_of(&deref(region, "region"), img)));
  });
}

mtsar_status mtsar_quicklook_export(const mtsar_image* image, const char* path, double lo_db,
                                    double hi_db) {
  return guarded([&] {
    mtsar::export_quicklook(deref(image, "image").image, cstr(path, "path"), lo_db, hi_db);
  });
}

mtsar_status mtsar_stack_read_manifest(const char* path, mtsar_stack** out) {
  return guarded([&] {
    out_param(out);
    auto loaded = mtsar::read_manifest(cstr(path, "path"));
    if (!loaded.stack) {
      mtsar::fail(mtsar::ErrorCode::kSchemaViolation,
                  std::string(path) + ": manifest lists no images (simulation recipe only)");
    }
    *out = new mtsar_stack{std::move(*loaded.stack), std::move(loaded.truth)};
  });
}

void mtsar_stack_free(mtsar_stack* stack) { delete stack; }
size_t mtsar_stack_size(const mtsar_stack* stack) { return stack ? stack->stack.size() : 0; }
double mtsar_stack_looks(const mtsar_stack* stack) { return stack ? stack->stack.looks : 0.0; }
uint64_t mtsar_stack_width(const mtsar_stack* stack) { return stack ? stack->stack.width() : 0; }
uint64_t mtsar_stack_height(const mtsar_stack* stack) { return stack ? stack->stack.height() : 0; }

const char* mtsar_stack_date(const mtsar_stack* stack, size_t index) {
  if (stack == nullptr || index >= stack->stack.size()) return nullptr;
  return stack->stack.dates[index].c_str();
}

mtsar_status mtsar_stack_find_date(const mtsar_stack* stack, const char* date, size_t* index) {
  return guarded([&] {
    const auto& s = deref(stack, "stack").stack;
    const std::string label = cstr(date, "date");
    if (index == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "index is NULL");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.dates[i] == label) {
        *index = i;
        return;
      }
    }
    mtsar::fail(mtsar::ErrorCode::kIndexOutOfRange, "no date labelled '" + label + "'");
  });
}

mtsar_status mtsar_stack_image(const mtsar_stack* stack, size_t index, mtsar_image** out) {
  return guarded([&] {
    const auto& s = deref(stack, "stack").stack;
    if (index >= s.size()) mtsar::fail(mtsar::ErrorCode::kIndexOutOfRange, "date index out of range");
    emit(out_param(out), s.images[index]);
  });
}

int mtsar_stack_has_truth(const mtsar_stack* stack) {
  return stack != nullptr && !stack->truth.empty() ? 1 : 0;
}

mtsar_status mtsar_stack_truth(const mtsar_stack* stack, size_t index, mtsar_image** out) {
  return guarded([&] {
    const auto& s = deref(stack, "stack");
    if (s.truth.empty()) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "stack carries no truth images");
    if (index >= s.truth.size()) mtsar::fail(mtsar::ErrorCode::kIndexOutOfRange, "date index out of range");
    emit(out_param(out), s.truth[index]);
  });
}

mtsar_status mtsar_sample_speckle(double looks, uint64_t width, uint64_t height, uint64_t seed,
                                  mtsar_image** out) {
  return guarded([&] { emit(out_param(out), mtsar::sample_speckle(looks, width, height, seed)); });
}

mtsar_status mtsar_simulate(const char* scene_script_json, uint64_t seed, const char* out_dir,
                            const char* base_dir) {
  return guarded([&] {
    mtsar::write_simulation(cstr(scene_script_json, "scene script"), seed, cstr(out_dir, "out_dir"),
                            base_dir ? std::filesystem::path(base_dir) : std::filesystem::path());
  });
}

mtsar_status mtsar_despeckler_create(const char* spec, double timeout_seconds, mtsar_despeckler** out) {
  return guarded([&] {
    out_param(out);
    auto parsed = mtsar::parse_despeckler_spec(cstr(spec, "spec"), timeout_seconds);
    auto description = mtsar::describe(parsed);
    *out = new mtsar_despeckler{std::move(parsed), std::move(description)};
  });
}

void mtsar_despeckler_free(mtsar_despeckler* despeckler) { delete despeckler; }

const char* mtsar_despeckler_describe(const mtsar_despeckler* despeckler) {
  return despeckler ? despeckler->description.c_str() : nullptr;
}

mtsar_status mtsar_despeckler_caps(const mtsar_despeckler* despeckler, char** caps_json) {
  return guarded([&] {
    const auto& d = deref(despeckler, "despeckler");
    out_param(caps_json);
    mtsar::PluginCaps caps{1, d.description};
    if (const auto* ext = std::get_if<mtsar::ExternalSpec>(&d.spec)) {
      caps = mtsar::query_caps(ext->command, ext->timeout_seconds);
    }
    *caps_json = dup_string(nlohmann::ordered_json{{"protocol", caps.protocol}, {"name", caps.name}}.dump());
  });
}

mtsar_status mtsar_despeckle(const mtsar_despeckler* despeckler, const mtsar_image* image, double looks,
                             mtsar_image** out) {
  return guarded([&] {
    const auto& d = deref(despeckler, "despeckler");
    emit(out_param(out), mtsar::despeckle(deref(image, "image").image, d.spec, looks_of(looks)));
  });
}

mtsar_status mtsar_super_image(const mtsar_stack* stack, mtsar_image** out) {
  return guarded([&] { emit(out_param(out), mtsar::super_image(deref(stack, "stack").stack)); });
}

mtsar_status mtsar_ratio_image(const mtsar_image* w, const mtsar_image* s, double eps_rel,
                               mtsar_image** out) {
  return guarded([&] {
    emit(out_param(out),
         mtsar::ratio_image(deref(w, "w").image, deref(s, "s").image, policy_of(eps_rel)));
  });
}

mtsar_status mtsar_preestimates_compute(const mtsar_stack* stack, const mtsar_despeckler* despeckler,
                                        size_t jobs, mtsar_image_list** out) {
  return guarded([&] {
    const auto& s = deref(stack, "stack").stack;
    const auto& d = deref(despeckler, "despeckler");
    out_param(out);
    auto pre = mtsar::compute_preestimates(s, mtsar::make_despeckler(d.spec, s.looks),
                                           jobs == 0 ? mtsar::default_jobs() : jobs);
    *out = new mtsar_image_list{std::move(pre)};
  });
}

void mtsar_image_list_free(mtsar_image_list* list) { delete list; }
size_t mtsar_image_list_size(const mtsar_image_list* list) { return list ? list->images.size() : 0; }

mtsar_status mtsar_quegan(const mtsar_stack* stack, const mtsar_image_list* preestimates,
                          size_t date_index, double eps_rel, mtsar_image** out) {
  return guarded([&] {
    emit(out_param(out), mtsar::quegan(deref(stack, "stack").stack,
                                       deref(preestimates, "preestimates").images, date_index,
                                       policy_of(eps_rel)));
  });
}

mtsar_status mtsar_rabasar(const mtsar_image* w, const mtsar_image* s,
                           const mtsar_despeckler* ratio_despeckler, double looks, double eps_rel,
                           mtsar_image** out) {
  return guarded([&] {
    emit(out_param(out), mtsar::rabasar(deref(w, "w").image, deref(s, "s").image,
                                        deref(ratio_despeckler, "ratio despeckler").spec,
                                        policy_of(eps_rel), looks_of(looks)));
  });
}

mtsar_status mtsar_rabasar_denoised_super(const mtsar_stack* stack, size_t date_index,
                                          const mtsar_despeckler* super_despeckler,
                                          const mtsar_despeckler* ratio_despeckler, double eps_rel,
                                          mtsar_image** out) {
  return guarded([&] {
    emit(out_param(out),
         mtsar::rabasar_denoised_super(deref(stack, "stack").stack, date_index,
                                       deref(super_despeckler, "super despeckler").spec,
                                       deref(ratio_despeckler, "ratio despeckler").spec,
                                       policy_of(eps_rel)));
  });
}

mtsar_status mtsar_accumulator_create(uint64_t width, uint64_t height, mtsar_accumulator** out) {
  return guarded([&] {
    out_param(out);
    if (width == 0 || height == 0) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "accumulator dims must be >= 1");
    *out = new mtsar_accumulator{mtsar::SuperImageAccumulator(width, height)};
  });
}

mtsar_status mtsar_accumulator_load(const char* sum_path, const char* sidecar_path,
                                    mtsar_accumulator** out) {
  return guarded([&] {
    out_param(out);
    const std::filesystem::path sum = cstr(sum_path, "sum_path");
    const auto sidecar = sidecar_path ? std::filesystem::path(sidecar_path) : mtsar::accumulator_sidecar(sum);
    *out = new mtsar_accumulator{mtsar::SuperImageAccumulator::load(sum, sidecar)};
  });
}

mtsar_status mtsar_accumulator_save(const mtsar_accumulator* acc, const char* sum_path,
                                    const char* sidecar_path) {
  return guarded([&] {
    const std::filesystem::path sum = cstr(sum_path, "sum_path");
    const auto sidecar = sidecar_path ? std::filesystem::path(sidecar_path) : mtsar::accumulator_sidecar(sum);
    deref(acc, "accumulator").acc.save(sum, sidecar);
  });
}

void mtsar_accumulator_free(mtsar_accumulator* acc) { delete acc; }

mtsar_status mtsar_accumulator_update(mtsar_accumulator* acc, const mtsar_image* image) {
  return guarded([&] {
    if (acc == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "accumulator is NULL");
    acc->acc.update(deref(image, "image").image);
  });
}

uint64_t mtsar_accumulator_count(const mtsar_accumulator* acc) { return acc ? acc->acc.count() : 0; }

mtsar_status mtsar_accumulator_current(const mtsar_accumulator* acc, mtsar_image** out) {
  return guarded([&] { emit(out_param(out), deref(acc, "accumulator").acc.current()); });
}

mtsar_status mtsar_enl(const mtsar_image* image, const mtsar_region* region, double* value, int* defined) {
  return guarded([&] {
    const auto& img = deref(image, "image").image;
    if (value == nullptr || defined == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output is NULL");
    const auto e = mtsar::enl(img, region_of(region, img));
    *defined = e.has_value() ? 1 : 0;
    *value = e.value_or(std::nan(""));
  });
}

mtsar_status mtsar_mse(const mtsar_image* estimate, const mtsar_image* truth, double* value) {
  return guarded([&] {
    if (value == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output is NULL");
    *value = mtsar::mse(deref(estimate, "estimate").image, deref(truth, "truth").image);
  });
}

mtsar_status mtsar_psnr(const mtsar_image* estimate, const mtsar_image* truth, double* value) {
  return guarded([&] {
    if (value == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output is NULL");
    *value = mtsar::psnr(deref(estimate, "estimate").image, deref(truth, "truth").image);
  });
}

mtsar_status mtsar_mean_ratio(const mtsar_image* estimate, const mtsar_image* truth,
                              const mtsar_region* region, double* value) {
  return guarded([&] {
    const auto& t = deref(truth, "truth").image;
    if (value == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output is NULL");
    *value = mtsar::mean_ratio(deref(estimate, "estimate").image, t, region_of(region, t));
  });
}

mtsar_status mtsar_residual_stats(const mtsar_image* noisy, const mtsar_image* estimate, double eps_rel,
                                  double* mean, double* enl, int* enl_defined) {
  return guarded([&] {
    if (mean == nullptr || enl == nullptr || enl_defined == nullptr) {
      mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output is NULL");
    }
    const auto r = mtsar::residual_stats(deref(noisy, "noisy").image, deref(estimate, "estimate").image,
                                         policy_of(eps_rel));
    *mean = r.mean;
    *enl_defined = r.enl.has_value() ? 1 : 0;
    *enl = r.enl.value_or(std::nan(""));
  });
}

mtsar_status mtsar_log_variance(const mtsar_image* image, const mtsar_region* region, double* value) {
  return guarded([&] {
    const auto& img = deref(image, "image").image;
    if (value == nullptr) mtsar::fail(mtsar::ErrorCode::kInvalidArgument, "output is NULL");
    *value = mtsar::log_variance(img, region_of(region, img));
  });
}

mtsar_status mtsar_metrics_report(const mtsar_image* estimate, const mtsar_image* truth,
                                  const mtsar_image* noisy, const mtsar_region* region, double eps_rel,
                                  const char* label, char** json_lines) {
  return guarded([&] {
    out_param(json_lines);
    const auto& full = deref(estimate, "estimate").image;
    const auto reg = region_of(region, full);
    const auto policy = policy_of(eps_rel);
    auto view = [&](const mtsar_image* img) { return mtsar::crop(img->image, reg); };
    const mtsar::Image est = view(estimate);

    std::vector<mtsar::MetricReport> reports;
    reports.push_back(mtsar::make_report("mean", mtsar::mean(est)));
    reports.push_back(mtsar::make_report("enl", mtsar::enl(est)));
    try {
      reports.push_back(mtsar::make_report("log_variance", mtsar::log_variance(est)));
    } catch (const mtsar::Error& e) {
      if (e.code() != mtsar::ErrorCode::kNonPositiveValue) throw;
    }
    if (truth != nullptr) {
      if (!truth->image.same_shape(full)) {
        mtsar::fail(mtsar::ErrorCode::kDimensionMismatch, "truth size differs from estimate");
      }
      const mtsar::Image tru = view(truth);
      reports.push_back(mtsar::make_report("mse", mtsar::mse(est, tru)));
      reports.push_back(mtsar::make_report("psnr", mtsar::psnr(est, tru)));
      reports.push_back(mtsar::make_report("mean_ratio", mtsar::mean_ratio(est, tru)));
    }
    if (noisy != nullptr) {
      if (!noisy->image.same_shape(full)) {
        mtsar::fail(mtsar::ErrorCode::kDimensionMismatch, "noisy size differs from estimate");
      }
      const auto r = mtsar::residual_stats(view(noisy), est, policy);
      reports.push_back(mtsar::make_report("residual_mean", r.mean));
      reports.push_back(mtsar::make_report("residual_enl", r.enl));
    }
    std::string lines;
    for (auto& rep : reports) {
      rep.region = reg;
      if (label != nullptr) rep.params["label"] = label;
      lines += mtsar::to_json_line(rep);
      lines += '\n';
    }
    *json_lines = dup_string(lines);
  });
}

}  // extern "C"
