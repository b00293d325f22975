// Copyright 2026 The trisplat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "trisplat/error.hpp"
#include "trisplat/io.hpp"

namespace trisplat {

namespace {

namespace fs = std::filesystem;

struct Raw8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;
};

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngError {
  char message[256] = "unknown error";
};

void png_fail(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

// libpng reports errors by longjmp, so the decode loops live in plain
// functions without automatic objects that need destruction.
bool decode_png(std::FILE* f, Raw8& out, PngError& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  png_bytep* rows = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    delete[] rows;
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int type = png_get_color_type(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * out.height);
  rows = new png_bytep[out.height];
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + y * stride;
  png_read_image(png, rows);
  delete[] rows;
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_png(std::FILE* f, const Raw8& img, PngError& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.bytes.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

Raw8 read_png(const fs::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw DataError("cannot open image " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError("not a PNG file: " + path.string());
  }
  Raw8 out;
  PngError err;
  if (!decode_png(f.get(), out, err)) {
    throw DataError(path.string() + ": png: " + err.message);
  }
  return out;
}

void write_png(const Raw8& img, const fs::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw DataError("cannot write image " + path.string());
  PngError err;
  if (!encode_png(f.get(), img, err)) {
    throw DataError(path.string() + ": png: " + err.message);
  }
}

Raw8 read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6" && magic != "P5") {
    throw DataError(path.string() + ": only binary P5/P6 images are supported");
  }
  auto next_int = [&]() {
    while (in >> std::ws && in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
    }
    int v = -1;
    if (!(in >> v)) throw DataError(path.string() + ": truncated header");
    return v;
  };
  Raw8 out;
  out.width = next_int();
  out.height = next_int();
  const int maxval = next_int();
  if (out.width <= 0 || out.height <= 0 || maxval != 255) {
    throw DataError(path.string() + ": unsupported dimensions or maxval");
  }
  in.get();
  out.channels = magic == "P6" ? 3 : 1;
  out.bytes.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
  in.read(reinterpret_cast<char*>(out.bytes.data()), static_cast<std::streamsize>(out.bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.bytes.size())) {
    throw DataError(path.string() + ": truncated pixel data");
  }
  return out;
}

void write_pnm(const Raw8& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image " + path.string());
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.bytes.data()),
            static_cast<std::streamsize>(img.bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

Raw8 read_raw(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
  return read_png(path);
}

void write_raw(const Raw8& img, const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    write_pnm(img, path);
  } else if (ext == ".png") {
    write_png(img, path);
  } else {
    throw UsageError("unsupported image extension '" + ext + "' (use .png or .ppm)");
  }
}

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

Image read_image(const fs::path& path) {
  const Raw8 raw = read_raw(path);
  Image img(raw.width, raw.height, 3);
  const int color_channels = raw.channels >= 3 ? 3 : 1;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const int src = color_channels == 3 ? c : 0;
      img.data[3 * i + c] = raw.bytes[i * raw.channels + src] / 255.0;
    }
  }
  return img;
}

Mask read_mask(const fs::path& path) {
  const Raw8 raw = read_raw(path);
  Mask m{raw.width, raw.height, {}};
  m.data.resize(static_cast<std::size_t>(raw.width) * raw.height);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    m.data[i] = raw.bytes[i * raw.channels] > 127 ? 1 : 0;
  }
  return m;
}

void write_mask(const Mask& mask, const fs::path& path) {
  Raw8 raw{mask.width, mask.height, 1, {}};
  raw.bytes.resize(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) raw.bytes[i] = mask.data[i] ? 255 : 0;
  write_raw(raw, path);
}

void write_image(const Image& img, const fs::path& path) {
  if (img.channels != 1 && img.channels != 3) {
    throw UsageError("write_image expects 1 or 3 channels");
  }
  Raw8 raw{img.width, img.height, img.channels, {}};
  raw.bytes.resize(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) raw.bytes[i] = quantize(img.data[i]);
  write_raw(raw, path);
}

}  // namespace trisplat
