/* Copyright 2026 The mtsar Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to libmtsar: multi-temporal SAR speckle filtering.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an mtsar_status;
 * on failure, mtsar_last_error() describes the cause for the calling
 * thread until its next failing call. Output handles are only written on
 * success. All functions are safe to call concurrently on distinct
 * handles; image, stack and despeckler handles are read-only after
 * creation and may be shared.
 */

#ifndef MTSAR_MTSAR_H_
#define MTSAR_MTSAR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MTSAR_BUILDING_LIBRARY)
#    define MTSAR_API __declspec(dllexport)
#  else
#    define MTSAR_API __declspec(dllimport)
#  endif
#else
#  define MTSAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtsar_status {
  MTSAR_OK = 0,
  MTSAR_ERR_INVALID_ARGUMENT = 1,
  MTSAR_ERR_DIMENSION_MISMATCH = 2,
  MTSAR_ERR_EMPTY_STACK = 3,
  MTSAR_ERR_NON_POSITIVE_LOOKS = 4,
  MTSAR_ERR_OUT_OF_BOUNDS = 5,
  MTSAR_ERR_NON_POSITIVE_VALUE = 6,
  MTSAR_ERR_NON_FINITE = 7,
  MTSAR_ERR_INDEX_OUT_OF_RANGE = 8,
  MTSAR_ERR_DEGENERATE_REGION = 9,
  MTSAR_ERR_IO = 10,
  MTSAR_ERR_BAD_MAGIC = 11,
  MTSAR_ERR_UNSUPPORTED_VERSION = 12,
  MTSAR_ERR_UNSUPPORTED_DTYPE = 13,
  MTSAR_ERR_TRUNCATED_PAYLOAD = 14,
  MTSAR_ERR_TRAILING_DATA = 15,
  MTSAR_ERR_SCHEMA = 16,
  MTSAR_ERR_SUBPROCESS = 17,
  MTSAR_ERR_TIMEOUT = 18,
  MTSAR_ERR_MALFORMED_OUTPUT = 19,
  MTSAR_ERR_INTERNAL = 99
} mtsar_status;

typedef struct mtsar_image mtsar_image;
typedef struct mtsar_stack mtsar_stack;
typedef struct mtsar_image_list mtsar_image_list;
typedef struct mtsar_despeckler mtsar_despeckler;
typedef struct mtsar_accumulator mtsar_accumulator;

typedef struct mtsar_region {
  uint64_t x0;
  uint64_t y0;
  uint64_t w;
  uint64_t h;
} mtsar_region;

MTSAR_API const char* mtsar_version(void);
/* Short kebab-case name, e.g. "dimension-mismatch". */
MTSAR_API const char* mtsar_status_string(mtsar_status status);
MTSAR_API const char* mtsar_last_error(void);
/* Releases strings returned through char** out-parameters. */
MTSAR_API void mtsar_string_free(char* str);

/* ---- images ---------------------------------------------------------- */

MTSAR_API mtsar_status mtsar_image_create(uint64_t width, uint64_t height, const float* pixels,
                                          mtsar_image** out);
MTSAR_API void mtsar_image_free(mtsar_image* image);
MTSAR_API uint64_t mtsar_image_width(const mtsar_image* image);
MTSAR_API uint64_t mtsar_image_height(const mtsar_image* image);
/* Row-major pixels, valid for the lifetime of the handle. */
MTSAR_API const float* mtsar_image_data(const mtsar_image* image);

MTSAR_API mtsar_status mtsar_image_read(const char* path, mtsar_image** out);
MTSAR_API mtsar_status mtsar_image_write(const mtsar_image* image, const char* path);
MTSAR_API mtsar_status mtsar_image_crop(const mtsar_image* image, const mtsar_region* region,
                                        mtsar_image** out);
/* 8-bit grayscale PNG of 10*log10(x) clipped to [lo_db, hi_db]. */
MTSAR_API mtsar_status mtsar_quicklook_export(const mtsar_image* image, const char* path,
                                              double lo_db, double hi_db);

/* ---- stacks ---------------------------------------------------------- */

MTSAR_API mtsar_status mtsar_stack_read_manifest(const char* path, mtsar_stack** out);
MTSAR_API void mtsar_stack_free(mtsar_stack* stack);
MTSAR_API size_t mtsar_stack_size(const mtsar_stack* stack);
MTSAR_API double mtsar_stack_looks(const mtsar_stack* stack);
MTSAR_API uint64_t mtsar_stack_width(const mtsar_stack* stack);
MTSAR_API uint64_t mtsar_stack_height(const mtsar_stack* stack);
/* NULL when index is out of range. Valid for the lifetime of the stack. */
MTSAR_API const char* mtsar_stack_date(const mtsar_stack* stack, size_t index);
MTSAR_API mtsar_status mtsar_stack_find_date(const mtsar_stack* stack, const char* date,
                                             size_t* index);
/* Copies of date `index`. */
MTSAR_API mtsar_status mtsar_stack_image(const mtsar_stack* stack, size_t index, mtsar_image** out);
/* 1 when the manifest named a ground-truth image for every date. */
MTSAR_API int mtsar_stack_has_truth(const mtsar_stack* stack);
MTSAR_API mtsar_status mtsar_stack_truth(const mtsar_stack* stack, size_t index, mtsar_image** out);

/* ---- simulation ------------------------------------------------------ */

/* Unit-mean Gamma(L, 1/L) speckle from xoshiro256** seeded with `seed`. */
MTSAR_API mtsar_status mtsar_sample_speckle(double looks, uint64_t width, uint64_t height,
                                            uint64_t seed, mtsar_image** out);
/* Generates the stack described by a scene-script JSON document into
 * out_dir (w_*.sarr, v_*.sarr, manifest.json). base_dir, when non-NULL,
 * anchors a relative "base" path. */
MTSAR_API mtsar_status mtsar_simulate(const char* scene_script_json, uint64_t seed,
                                      const char* out_dir, const char* base_dir);

/* ---- despecklers ----------------------------------------------------- */

/* spec: "identity", "boxcar:K" or "external:CMD [ARG...]". */
MTSAR_API mtsar_status mtsar_despeckler_create(const char* spec, double timeout_seconds,
                                               mtsar_despeckler** out);
MTSAR_API void mtsar_despeckler_free(mtsar_despeckler* despeckler);
MTSAR_API const char* mtsar_despeckler_describe(const mtsar_despeckler* despeckler);
/* External plugins: runs the --caps handshake and returns its JSON reply.
 * Built-ins return {"protocol":1,"name":"<spec>"}. */
MTSAR_API mtsar_status mtsar_despeckler_caps(const mtsar_despeckler* despeckler, char** caps_json);
/* looks <= 0 leaves MTSAR_LOOKS unset for plugins. */
MTSAR_API mtsar_status mtsar_despeckle(const mtsar_despeckler* despeckler, const mtsar_image* image,
                                       double looks, mtsar_image** out);

/* ---- multi-temporal filters ------------------------------------------ */

MTSAR_API mtsar_status mtsar_super_image(const mtsar_stack* stack, mtsar_image** out);
MTSAR_API mtsar_status mtsar_ratio_image(const mtsar_image* w, const mtsar_image* s, double eps_rel,
                                         mtsar_image** out);

/* Despeckles every date once (up to `jobs` in parallel; 0 = all cores). */
MTSAR_API mtsar_status mtsar_preestimates_compute(const mtsar_stack* stack,
                                                  const mtsar_despeckler* despeckler, size_t jobs,
                                                  mtsar_image_list** out);
MTSAR_API void mtsar_image_list_free(mtsar_image_list* list);
MTSAR_API size_t mtsar_image_list_size(const mtsar_image_list* list);

MTSAR_API mtsar_status mtsar_quegan(const mtsar_stack* stack, const mtsar_image_list* preestimates,
                                    size_t date_index, double eps_rel, mtsar_image** out);
MTSAR_API mtsar_status mtsar_rabasar(const mtsar_image* w, const mtsar_image* s,
                                     const mtsar_despeckler* ratio_despeckler, double looks,
                                     double eps_rel, mtsar_image** out);
MTSAR_API mtsar_status mtsar_rabasar_denoised_super(const mtsar_stack* stack, size_t date_index,
                                                    const mtsar_despeckler* super_despeckler,
                                                    const mtsar_despeckler* ratio_despeckler,
                                                    double eps_rel, mtsar_image** out);

/* ---- incremental super-image ----------------------------------------- */

MTSAR_API mtsar_status mtsar_accumulator_create(uint64_t width, uint64_t height,
                                                mtsar_accumulator** out);
/* sidecar_path NULL means "<sum_path>.json". */
MTSAR_API mtsar_status mtsar_accumulator_load(const char* sum_path, const char* sidecar_path,
                                              mtsar_accumulator** out);
MTSAR_API mtsar_status mtsar_accumulator_save(const mtsar_accumulator* acc, const char* sum_path,
                                              const char* sidecar_path);
MTSAR_API void mtsar_accumulator_free(mtsar_accumulator* acc);
MTSAR_API mtsar_status mtsar_accumulator_update(mtsar_accumulator* acc, const mtsar_image* image);
MTSAR_API uint64_t mtsar_accumulator_count(const mtsar_accumulator* acc);
MTSAR_API mtsar_status mtsar_accumulator_current(const mtsar_accumulator* acc, mtsar_image** out);

/* ---- metrics ---------------------------------------------------------- */
/* region NULL means the full frame. */

MTSAR_API mtsar_status mtsar_enl(const mtsar_image* image, const mtsar_region* region, double* value,
                                 int* defined);
MTSAR_API mtsar_status mtsar_mse(const mtsar_image* estimate, const mtsar_image* truth, double* value);
/* May report +infinity when estimate == truth. */
MTSAR_API mtsar_status mtsar_psnr(const mtsar_image* estimate, const mtsar_image* truth, double* value);
MTSAR_API mtsar_status mtsar_mean_ratio(const mtsar_image* estimate, const mtsar_image* truth,
                                        const mtsar_region* region, double* value);
MTSAR_API mtsar_status mtsar_residual_stats(const mtsar_image* noisy, const mtsar_image* estimate,
                                            double eps_rel, double* mean, double* enl,
                                            int* enl_defined);
MTSAR_API mtsar_status mtsar_log_variance(const mtsar_image* image, const mtsar_region* region,
                                          double* value);

/* JSON-Lines report (one object per metric) for `estimate`; truth and
 * noisy are optional and add the reference-based metrics. label, when
 * non-NULL, is attached to each line as params.label. */
MTSAR_API mtsar_status mtsar_metrics_report(const mtsar_image* estimate, const mtsar_image* truth,
                                            const mtsar_image* noisy, const mtsar_region* region,
                                            double eps_rel, const char* label, char** json_lines);

#ifdef __cplusplus
}
#endif

#endif /* MTSAR_MTSAR_H_ */
