// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/cropaug.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "t2i/errors.hpp"
#include "t2i/rng.hpp"

namespace t2i {

bool CropSpec::valid() const noexcept {
  return x0 >= 0.0 && y0 >= 0.0 && x1 <= 1.0 && y1 <= 1.0 && width() > 0.5 && height() > 0.5;
}

std::size_t TokenMask::popcount() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

namespace {

// Side in (0.5, 1] and a start so that start + side <= 1.
std::pair<double, double> sample_axis(Rng& rng) {
  const double side = 1.0 - 0.5 * rng.uniform01();
  double start = rng.uniform01() * (1.0 - side);
  if (start + side > 1.0) start = 1.0 - side;
  return {start, start + side};
}

}  // namespace

CropSpec sample_crop(std::uint64_t seed) {
  Rng rng(seed);
  const auto [x0, x1] = sample_axis(rng);
  const auto [y0, y1] = sample_axis(rng);
  return {x0, y0, x1, y1};
}

std::string crop_tokens(const CropSpec& spec) {
  std::string out = "<crop";
  char buf[64];
  for (double v : {spec.x0, spec.y0, spec.x1, spec.y1}) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    out += ' ';
    out.append(buf, res.ptr);
  }
  out += "> ";
  return out;
}

std::optional<ParsedCropCaption> parse_crop_tokens(std::string_view text) {
  constexpr std::string_view kOpen = "<crop ";
  if (!text.starts_with(kOpen)) return std::nullopt;
  const auto close = text.find("> ");
  if (close == std::string_view::npos) return std::nullopt;
  const std::string_view body = text.substr(kOpen.size(), close - kOpen.size());

  double v[4];
  const char* p = body.data();
  const char* end = body.data() + body.size();
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      if (p == end || *p != ' ') return std::nullopt;
      ++p;
    }
    const auto res = std::from_chars(p, end, v[i], std::chars_format::fixed);
    if (res.ec != std::errc()) return std::nullopt;
    p = res.ptr;
  }
  if (p != end) return std::nullopt;
  return ParsedCropCaption{{v[0], v[1], v[2], v[3]}, std::string(text.substr(close + 2))};
}

TokenMask patch_mask(const CropSpec& spec, int grid_w, int grid_h) {
  if (grid_w < 1 || grid_h < 1) throw ArgumentError("mask grid dims must be >= 1");
  TokenMask mask{grid_w, grid_h, std::vector<std::uint8_t>(static_cast<std::size_t>(grid_w) * grid_h, 0)};
  for (int j = 0; j < grid_h; ++j) {
    const double cy = (j + 0.5) / grid_h;
    const bool row_in = cy >= spec.y0 && cy < spec.y1;
    for (int i = 0; i < grid_w; ++i) {
      const double cx = (i + 0.5) / grid_w;
      mask.bits[static_cast<std::size_t>(j) * grid_w + i] = row_in && cx >= spec.x0 && cx < spec.x1;
    }
  }
  return mask;
}

}  // namespace t2i
