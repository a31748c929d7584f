// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/toy_dataset.hpp"

#include <algorithm>
#include <cstdio>

#include "t2i/captioner.hpp"
#include "t2i/errors.hpp"
#include "t2i/rng.hpp"

namespace t2i {

Image render_toy(std::string_view label, std::uint64_t seed, const ToyParams& p) {
  Rng rng(seed);
  Image img(p.size, p.size, 1, p.background);
  const double mid = p.size / 2.0;
  if (label == "disk") {
    const double cx = mid + (2.0 * rng.uniform01() - 1.0) * p.center_jitter;
    const double cy = mid + (2.0 * rng.uniform01() - 1.0) * p.center_jitter;
    const double r = p.disk_radius + (2.0 * rng.uniform01() - 1.0) * p.radius_jitter;
    for (int y = 0; y < p.size; ++y) {
      for (int x = 0; x < p.size; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= r * r) img.at(x, y) = p.foreground;
      }
    }
  } else if (label == "stripe") {
    const int offset = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(2 * p.stripe_jitter + 1))) -
                       p.stripe_jitter;
    const int x0 = p.size / 2 - p.stripe_width / 2 + offset;
    for (int y = 0; y < p.size; ++y) {
      for (int x = std::max(0, x0); x < std::min(p.size, x0 + p.stripe_width); ++x) img.at(x, y) = p.foreground;
    }
  } else {
    throw ArgumentError("unknown toy class '" + std::string(label) + "'");
  }
  for (auto& v : img.data) {
    v = std::clamp(v + p.pixel_noise * static_cast<float>(2.0 * rng.uniform01() - 1.0), -1.0f, 1.0f);
  }
  return img;
}

ToyDataset make_toy_dataset(std::size_t n_per_class, std::uint64_t seed, const ToyParams& params) {
  if (n_per_class < 2) throw ArgumentError("n_per_class must be >= 2");
  ToyDataset out;
  out.manifest.seed = seed;
  out.manifest.created_by = tool_version();
  std::uint64_t class_index = 0;
  for (const std::string label : {"disk", "stripe"}) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      char id[64];
      std::snprintf(id, sizeof id, "%s-%05zu", label.c_str(), i);
      ImageRecord r;
      r.id = id;
      r.path = "images/" + r.id + ".png";
      r.width = params.size;
      r.height = params.size;
      r.class_label = label;
      r.source = ImageSource::Original;
      out.images.emplace(r.id, render_toy(label, derive_seed(derive_seed(seed, class_index), i), params));
      out.manifest.captions.push_back({r.id, aio_caption(label), CaptionKind::AIO, "template"});
      out.manifest.captions.push_back({r.id, stub_caption(r, seed), CaptionKind::TA, "stub"});
      out.manifest.records.push_back(std::move(r));
    }
    ++class_index;
  }
  canonicalize(out.manifest);
  return out;
}

ToyDataset write_toy_dataset(const std::filesystem::path& out_dir, std::size_t n_per_class, std::uint64_t seed,
                             const ToyParams& params) {
  ToyDataset toy = make_toy_dataset(n_per_class, seed, params);
  for (const auto& r : toy.manifest.records) write_png(out_dir / r.path, toy.images.at(r.id));
  write_manifest(toy.manifest, out_dir / "manifest.jsonl");
  return toy;
}

}  // namespace t2i
