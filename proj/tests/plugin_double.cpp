// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

// Misbehaving and special-purpose denoiser plugins for tests:
//   plugin_double --mode=MODE [<in> <out> | --caps]
// MODE: echo, ones, looks (fill with MTSAR_LOOKS, 0 if unset), wrong-dims,
// fail, sleep, garbage, no-output, bad-caps.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "mtsar/io.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || std::strncmp(argv[1], "--mode=", 7) != 0) {
    std::cerr << "first argument must be --mode=MODE\n";
    return 2;
  }
  const std::string mode = argv[1] + 7;
  if (argc == 3 && std::strcmp(argv[2], "--caps") == 0) {
    if (mode == "bad-caps") {
      std::cout << "{\"protocol\": 2, \"name\": \"future\"}\n";
    } else {
      std::cout << "{\"protocol\": 1, \"name\": \"double-" << mode << "\"}\n";
    }
    return 0;
  }
  if (argc != 4) {
    std::cerr << "usage: plugin_double --mode=MODE <in> <out>\n";
    return 2;
  }
  try {
    const mtsar::Image in = mtsar::read_image(argv[2]);
    if (mode == "echo") {
      mtsar::write_image(in, argv[3]);
    } else if (mode == "ones") {
      mtsar::write_image(mtsar::Image::filled(in.width(), in.height(), 1.0f), argv[3]);
    } else if (mode == "looks") {
      const char* env = std::getenv("MTSAR_LOOKS");
      const float v = env ? std::stof(env) : 0.0f;
      mtsar::write_image(mtsar::Image::filled(in.width(), in.height(), v), argv[3]);
    } else if (mode == "wrong-dims") {
      mtsar::write_image(mtsar::Image::filled(in.width() + 1, in.height(), 1.0f), argv[3]);
    } else if (mode == "fail") {
      std::cerr << "model weights not found\n";
      return 3;
    } else if (mode == "sleep") {
      std::this_thread::sleep_for(std::chrono::seconds(30));
      mtsar::write_image(in, argv[3]);
    } else if (mode == "garbage") {
      std::ofstream(argv[3], std::ios::binary) << "not a raster";
    } else if (mode == "no-output") {
      return 0;
    } else {
      std::cerr << "unknown mode " << mode << '\n';
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
