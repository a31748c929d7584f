// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace t2i {

/// Normalized crop rectangle [x0, x1) x [y0, y1) within the unit square.
struct CropSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double area() const noexcept { return width() * height(); }

  /// Inside the unit square and each side strictly longer than half.
  bool valid() const noexcept;

  friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

/// Per-patch mask; true marks a token whose centre lies inside the crop.
struct TokenMask {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<std::uint8_t> bits;  // row-major, grid_h rows of grid_w

  bool at(int i, int j) const { return bits[static_cast<std::size_t>(j) * grid_w + i] != 0; }
  std::size_t popcount() const;
  double fraction() const { return static_cast<double>(popcount()) / static_cast<double>(bits.size()); }

  friend bool operator==(const TokenMask&, const TokenMask&) = default;
};

/// Side lengths uniform in (0.5, 1] per axis, offset uniform in the feasible range.
CropSpec sample_crop(std::uint64_t seed);

/// "<crop x0 y0 x1 y1> " with two decimals, round-half-to-even on the exact
/// binary value, independent of the C locale.
std::string crop_tokens(const CropSpec& spec);

struct ParsedCropCaption {
  CropSpec spec;
  std::string caption;  // remainder after the prefix
};

/// Inverse of crop_tokens(spec) + caption. nullopt if no well-formed prefix.
/// The recovered spec is not required to satisfy valid().
std::optional<ParsedCropCaption> parse_crop_tokens(std::string_view text);

/// Throws ArgumentError for grid dims < 1.
TokenMask patch_mask(const CropSpec& spec, int grid_w, int grid_h);

}  // namespace t2i
