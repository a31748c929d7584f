// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace t2i {

/// Interleaved float image with pixel values in [-1, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t size() const noexcept { return data.size(); }

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Bilinear resample with half-pixel centers and edge clamping.
Image resize_bilinear(const Image& src, int out_w, int out_h);

/// Copy of the rectangle [x, x+w) x [y, y+h). Throws GeometryError if out of bounds.
Image crop_region(const Image& src, int x, int y, int w, int h);

/// 64-bit FNV-1a over the raw float bytes plus dimensions.
std::uint64_t image_checksum(const Image& img);

// PNG codec: 8-bit gray or RGB; [-1,1] <-> [0,255].
std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace t2i
