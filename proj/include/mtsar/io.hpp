// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mtsar/core.hpp"

namespace mtsar {

// .sarr layout, all little-endian:
//   0  char[4] "SARR"
//   4  u8      version (1)
//   5  u8      dtype (0 = f32)
//   6  u8[2]   reserved, zero
//   8  u32     width
//   12 u32     height
//   16 f32     payload, width * height values, row-major
inline constexpr std::size_t kSarrHeaderSize = 16;
inline constexpr std::uint8_t kSarrVersion = 1;
inline constexpr std::uint8_t kSarrDtypeF32 = 0;

std::vector<std::uint8_t> encode_sarr(const Image& image);
// `source` only feeds error messages.
Image decode_sarr(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

void write_image(const Image& image, const std::filesystem::path& path);
Image read_image(const std::filesystem::path& path);

inline constexpr double kQuicklookTiny = 1e-20;

/// dB display mapping: 10*log10(max(x, 1e-20)) clipped to [lo, hi], scaled
/// to [0, 255] and rounded half-to-even.
std::uint8_t quicklook_level(float intensity, double lo_db, double hi_db) noexcept;
std::vector<std::uint8_t> quicklook_gray(const Image& image, double lo_db, double hi_db);

/// Writes the mapping above as an 8-bit grayscale PNG.
void export_quicklook(const Image& image, const std::filesystem::path& path, double lo_db,
                      double hi_db);

// Decodes an 8-bit grayscale PNG written by export_quicklook.
std::vector<std::uint8_t> read_gray_png(const std::filesystem::path& path, std::size_t& width,
                                        std::size_t& height);

}  // namespace mtsar
