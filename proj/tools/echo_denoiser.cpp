// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

// Reference denoiser plugin: returns its input unchanged. Useful for
// checking a pipeline's plugin wiring end to end.

#include <cstdio>
#include <cstring>

#include "mtsar/mtsar.h"

int main(int argc, char** argv) {
  if (argc == 2 && std::strcmp(argv[1], "--caps") == 0) {
    std::puts("{\"protocol\": 1, \"name\": \"echo\"}");
    return 0;
  }
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <input.sarr> <output.sarr> | --caps\n", argv[0]);
    return 2;
  }
  mtsar_image* image = nullptr;
  if (mtsar_image_read(argv[1], &image) != MTSAR_OK) {
    std::fprintf(stderr, "echo: %s\n", mtsar_last_error());
    return 1;
  }
  const mtsar_status st = mtsar_image_write(image, argv[2]);
  mtsar_image_free(image);
  if (st != MTSAR_OK) {
    std::fprintf(stderr, "echo: %s\n", mtsar_last_error());
    return 1;
  }
  return 0;
}
