// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "mtsar/error.hpp"

namespace mtsar {

namespace {

static_assert(std::endian::native == std::endian::little, ".sarr I/O assumes a little-endian host");

constexpr std::uint8_t kMagic[4] = {'S', 'A', 'R', 'R'};

void put_u32(std::uint8_t* dst, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* src) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(src[i]) << (8 * i);
  return v;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

std::vector<std::uint8_t> encode_sarr(const Image& image) {
  if (image.width() > 0xFFFFFFFFu || image.height() > 0xFFFFFFFFu) {
    fail(ErrorCode::kInvalidArgument, "image too large for .sarr");
  }
  std::vector<std::uint8_t> bytes(kSarrHeaderSize + 4 * image.size());
  std::memcpy(bytes.data(), kMagic, 4);
  bytes[4] = kSarrVersion;
  bytes[5] = kSarrDtypeF32;
  put_u32(bytes.data() + 8, static_cast<std::uint32_t>(image.width()));
  put_u32(bytes.data() + 12, static_cast<std::uint32_t>(image.height()));
  if (!image.empty()) std::memcpy(bytes.data() + kSarrHeaderSize, image.pixels().data(), 4 * image.size());
  return bytes;
}

Image decode_sarr(std::span<const std::uint8_t> bytes, const std::string& source) {
  if (bytes.size() < kSarrHeaderSize) {
    fail(ErrorCode::kTruncatedPayload, source + ": file shorter than the 16-byte header");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorCode::kBadMagic, source + ": not a .sarr file");
  if (bytes[4] != kSarrVersion) {
    fail(ErrorCode::kUnsupportedVersion, source + ": unsupported version " + std::to_string(bytes[4]));
  }
  if (bytes[5] != kSarrDtypeF32) {
    fail(ErrorCode::kUnsupportedDtype, source + ": unsupported dtype " + std::to_string(bytes[5]));
  }
  if (bytes[6] != 0 || bytes[7] != 0) {
    fail(ErrorCode::kUnsupportedVersion, source + ": reserved header bytes are not zero");
  }
  const std::uint64_t width = get_u32(bytes.data() + 8);
  const std::uint64_t height = get_u32(bytes.data() + 12);
  const std::uint64_t expected = kSarrHeaderSize + 4 * width * height;
  if (bytes.size() < expected) {
    std::ostringstream msg;
    msg << source << ": payload holds " << bytes.size() - kSarrHeaderSize << " bytes, header promises "
        << expected - kSarrHeaderSize;
    fail(ErrorCode::kTruncatedPayload, msg.str());
  }
  if (bytes.size() > expected) fail(ErrorCode::kTrailingData, source + ": bytes after the payload");
  std::vector<float> px(width * height);
  if (!px.empty()) std::memcpy(px.data(), bytes.data() + kSarrHeaderSize, 4 * px.size());
  try {
    return Image(width, height, std::move(px));
  } catch (const Error& e) {
    fail(e.code(), source + ": " + e.what());
  }
}

void write_image(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_sarr(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::kIoFailure, "write to '" + path.string() + "' failed");
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIoFailure, "read of '" + path.string() + "' failed");
  return decode_sarr(bytes, path.string());
}

std::uint8_t quicklook_level(float intensity, double lo_db, double hi_db) noexcept {
  const double db = 10.0 * std::log10(std::max(static_cast<double>(intensity), kQuicklookTiny));
  const double clipped = std::clamp(db, lo_db, hi_db);
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  const double level = std::nearbyint((clipped - lo_db) / (hi_db - lo_db) * 255.0);
  return static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
}

std::vector<std::uint8_t> quicklook_gray(const Image& image, double lo_db, double hi_db) {
  if (!(lo_db < hi_db) || !std::isfinite(lo_db) || !std::isfinite(hi_db)) {
    fail(ErrorCode::kInvalidArgument, "quicklook dB range needs lo < hi");
  }
  std::vector<std::uint8_t> gray(image.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = quicklook_level(image[i], lo_db, hi_db);
  return gray;
}

void export_quicklook(const Image& image, const std::filesystem::path& path, double lo_db,
                      double hi_db) {
  auto gray = quicklook_gray(image, lo_db, hi_db);
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "cannot render an empty image");
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(ErrorCode::kIoFailure, "cannot open '" + path.string() + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::kIoFailure, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIoFailure, "PNG encoding of '" + path.string() + "' failed");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height(); ++y) png_write_row(png, gray.data() + y * image.width());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) fail(ErrorCode::kIoFailure, "write to '" + path.string() + "' failed");
}

std::vector<std::uint8_t> read_gray_png(const std::filesystem::path& path, std::size_t& width,
                                        std::size_t& height) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    fail(ErrorCode::kIoFailure, "cannot decode PNG '" + path.string() + "': " + img.message);
  }
  img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, gray.data(), 0, nullptr)) {
    png_image_free(&img);
    fail(ErrorCode::kIoFailure, "cannot decode PNG '" + path.string() + "': " + img.message);
  }
  width = img.width;
  height = img.height;
  return gray;
}

}  // namespace mtsar
