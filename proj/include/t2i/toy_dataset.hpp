// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Built-in two-class synthetic dataset: "disk" (bright centred disk on a dark
// field) and "stripe" (bright vertical stripe), with per-image jitter.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "t2i/image.hpp"
#include "t2i/manifest.hpp"

namespace t2i {

struct ToyParams {
  int size = 8;
  float background = -0.8f;
  float foreground = 0.8f;
  float pixel_noise = 0.05f;   // uniform amplitude
  double disk_radius = 2.5;    // +/- radius_jitter
  double radius_jitter = 0.5;
  double center_jitter = 0.5;  // disk centre offset, each axis
  int stripe_width = 2;
  int stripe_jitter = 1;       // stripe column offset from centre, +/-
};

/// Renders one image of @p label ("disk" or "stripe").
Image render_toy(std::string_view label, std::uint64_t seed, const ToyParams& params = {});

struct ToyDataset {
  DatasetManifest manifest;
  std::map<std::string, Image> images;  // by record id
};

/// n_per_class images per class with AIO and stub TA captions.
/// Throws ArgumentError when n_per_class < 2.
ToyDataset make_toy_dataset(std::size_t n_per_class, std::uint64_t seed, const ToyParams& params = {});

/// Writes PNGs under out_dir/images and the manifest to out_dir/manifest.jsonl.
ToyDataset write_toy_dataset(const std::filesystem::path& out_dir, std::size_t n_per_class, std::uint64_t seed,
                             const ToyParams& params = {});

}  // namespace t2i
