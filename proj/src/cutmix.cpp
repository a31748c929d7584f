// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/cutmix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "t2i/errors.hpp"
#include "t2i/parallel.hpp"
#include "t2i/rng.hpp"

namespace t2i {

double nominal_coverage(CutMixPattern pattern) {
  switch (pattern) {
    case CutMixPattern::Half: return 1.0 / 2.0;
    case CutMixPattern::Quarter: return 1.0 / 4.0;
    case CutMixPattern::Ninth: return 1.0 / 9.0;
    case CutMixPattern::Sixteenth: return 1.0 / 16.0;
    case CutMixPattern::All: break;
  }
  throw ArgumentError("pattern 'all' has no single coverage");
}

int central_square_side(int base_w, int base_h) {
  return static_cast<int>(std::ceil(std::sqrt(kCentralAreaFraction * base_w * base_h)));
}

bool disjoint_from_center(const Placement& p, int base_w, int base_h) {
  const double half = central_square_side(base_w, base_h) / 2.0;
  const double cx = base_w / 2.0;
  const double cy = base_h / 2.0;
  return p.x + p.w <= cx - half || p.x >= cx + half || p.y + p.h <= cy - half || p.y >= cy + half;
}

Placement plan_placement(CutMixPattern pattern, int base_w, int base_h, std::uint64_t seed) {
  if (pattern == CutMixPattern::All) throw ArgumentError("pattern 'all' cannot be placed on a single image");
  if (base_w < kMinCutMixSide || base_h < kMinCutMixSide) {
    throw GeometryError("base " + std::to_string(base_w) + "x" + std::to_string(base_h) + " is smaller than " +
                        std::to_string(kMinCutMixSide) + " px on a side");
  }
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(pattern)));

  switch (pattern) {
    case CutMixPattern::Half: {
      const bool split_rows = rng.uniform_int(2) == 0;
      const bool far_side = rng.uniform_int(2) == 1;
      if (split_rows) {
        const int h = base_h / 2;
        return {0, far_side ? base_h - h : 0, base_w, h};
      }
      const int w = base_w / 2;
      return {far_side ? base_w - w : 0, 0, w, base_h};
    }
    case CutMixPattern::Quarter: {
      const int w = base_w / 2;
      const int h = base_h / 2;
      const auto corner = rng.uniform_int(4);
      return {(corner & 1) ? base_w - w : 0, (corner & 2) ? base_h - h : 0, w, h};
    }
    case CutMixPattern::Ninth: {
      const int w = base_w / 3;
      const int h = base_h / 3;
      const int mid_x = (base_w - w) / 2;
      const int mid_y = (base_h - h) / 2;
      switch (rng.uniform_int(4)) {
        case 0: return {mid_x, 0, w, h};              // top
        case 1: return {base_w - w, mid_y, w, h};     // right
        case 2: return {mid_x, base_h - h, w, h};     // bottom
        default: return {0, mid_y, w, h};             // left
      }
    }
    case CutMixPattern::Sixteenth: {
      const int w = base_w / 4;
      const int h = base_h / 4;
      // (0,0) is the most distant slot from the centre; if it touches the
      // guarded square no position can avoid it.
      if (!disjoint_from_center({0, 0, w, h}, base_w, base_h)) {
        throw GeometryError("aspect ratio leaves no room for a sixteenth donor outside the centre");
      }
      const auto nx = static_cast<std::uint64_t>(base_w - w + 1);
      const auto ny = static_cast<std::uint64_t>(base_h - h + 1);
      for (int attempt = 0; attempt < 256; ++attempt) {
        Placement p{static_cast<int>(rng.uniform_int(nx)), static_cast<int>(rng.uniform_int(ny)), w, h};
        if (disjoint_from_center(p, base_w, base_h)) return p;
      }
      // Exhaustive fallback, practically unreachable for sane aspect ratios.
      std::vector<Placement> feasible;
      for (int y = 0; y < static_cast<int>(ny); ++y) {
        for (int x = 0; x < static_cast<int>(nx); ++x) {
          if (disjoint_from_center({x, y, w, h}, base_w, base_h)) feasible.push_back({x, y, w, h});
        }
      }
      return feasible[rng.uniform_int(feasible.size())];
    }
    case CutMixPattern::All: break;
  }
  throw ArgumentError("unknown pattern");
}

double coverage(const Placement& p, int base_w, int base_h) {
  return (static_cast<double>(p.w) * p.h) / (static_cast<double>(base_w) * base_h);
}

Image composite(const Image& base, const Image& donor, const Placement& p) {
  if (donor.empty()) throw GeometryError("donor image is empty");
  if (p.w < 1 || p.h < 1 || p.x < 0 || p.y < 0 || p.x + p.w > base.width || p.y + p.h > base.height) {
    throw GeometryError("placement out of bounds for a " + std::to_string(base.width) + "x" +
                        std::to_string(base.height) + " base");
  }
  if (donor.channels != base.channels) throw GeometryError("donor and base channel counts differ");
  const Image patch = resize_bilinear(donor, p.w, p.h);
  Image out = base;
  const auto row = static_cast<std::size_t>(p.w) * base.channels;
  for (int j = 0; j < p.h; ++j) {
    std::copy_n(&patch.data[static_cast<std::size_t>(j) * row], row,
                &out.data[(static_cast<std::size_t>(p.y + j) * base.width + p.x) * base.channels]);
  }
  return out;
}

Image apply_plan(const Image& base, const Image& donor, const CutMixPlan& plan) {
  if (plan.pattern != CutMixPattern::Half) return composite(base, donor, plan.placement);
  if (donor.empty()) throw GeometryError("donor image is empty");
  const Image matched = resize_bilinear(donor, base.width, base.height);
  const auto& p = plan.placement;
  return composite(base, crop_region(matched, p.x, p.y, p.w, p.h), p);
}

std::string cutmix_record_id(CutMixPattern setting, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return "cm-" + std::string(to_string(setting)) + "-" + buf;
}

std::vector<CutMixPlan> plan_cutmix(const DatasetManifest& manifest, CutMixPattern setting, std::size_t count,
                                    std::uint64_t seed) {
  if (count < 1) throw ArgumentError("count must be >= 1");

  // Labelled originals ordered by (class, id) so each class is one contiguous run.
  std::vector<const ImageRecord*> pool;
  for (const auto& r : manifest.records) {
    if (r.source == ImageSource::Original && r.class_label) pool.push_back(&r);
  }
  std::sort(pool.begin(), pool.end(), [](const ImageRecord* a, const ImageRecord* b) {
    return std::tie(*a->class_label, a->id) < std::tie(*b->class_label, b->id);
  });
  std::map<std::string, std::pair<std::size_t, std::size_t>> runs;  // class -> [begin, end)
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto [it, fresh] = runs.try_emplace(*pool[i]->class_label, i, i + 1);
    if (!fresh) it->second.second = i + 1;
  }
  if (runs.size() < 2) throw CurationError("cutmix needs labelled originals from at least 2 classes");

  std::vector<CutMixPlan> plans(count);
  parallel_for(static_cast<std::int64_t>(count), [&](std::int64_t i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const std::uint64_t item_seed = derive_seed(seed, idx);
    Rng rng(item_seed);
    const CutMixPattern pattern = setting == CutMixPattern::All ? kSinglePatterns[idx % 4] : setting;
    const ImageRecord* base = pool[rng.uniform_int(pool.size())];
    const auto [cb, ce] = runs.at(*base->class_label);
    auto k = static_cast<std::size_t>(rng.uniform_int(pool.size() - (ce - cb)));
    if (k >= cb) k += ce - cb;
    const ImageRecord* donor = pool[k];

    auto& plan = plans[static_cast<std::size_t>(i)];
    plan.base_id = base->id;
    plan.donor_id = donor->id;
    plan.pattern = pattern;
    plan.seed = item_seed;
    plan.placement = plan_placement(pattern, base->width, base->height, item_seed);
  });
  return plans;
}

DatasetManifest cutmix_manifest(const DatasetManifest& manifest, const std::vector<CutMixPlan>& plans,
                                CutMixPattern setting) {
  DatasetManifest out = manifest;
  out.records.reserve(out.records.size() + plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    const ImageRecord* base = manifest.find(plan.base_id);
    if (base == nullptr) throw CurationError("plan references unknown base '" + plan.base_id + "'");
    ImageRecord r;
    r.id = cutmix_record_id(setting, i);
    r.path = "cutmix/" + r.id + ".png";
    r.width = base->width;
    r.height = base->height;
    r.class_label = base->class_label;
    r.source = ImageSource::CutMix;
    r.provenance = AugmentationProvenance{plan.base_id, plan.donor_id, plan.pattern, plan.placement, plan.seed};
    out.records.push_back(std::move(r));
  }
  canonicalize(out);
  return out;
}

std::vector<Image> render_cutmix(const std::vector<CutMixPlan>& plans, const ImageLookup& images) {
  std::vector<Image> out(plans.size());
  parallel_for(static_cast<std::int64_t>(plans.size()), [&](std::int64_t i) {
    const auto& plan = plans[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = apply_plan(images(plan.base_id), images(plan.donor_id), plan);
  });
  return out;
}

DatasetManifest curate_cutmix(const DatasetManifest& manifest, const std::filesystem::path& images_root,
                              CutMixPattern setting, std::size_t count, std::uint64_t seed) {
  const auto plans = plan_cutmix(manifest, setting, count, seed);

  std::set<std::string> needed;
  for (const auto& p : plans) {
    needed.insert(p.base_id);
    needed.insert(p.donor_id);
  }
  std::map<std::string, Image> cache;
  for (const auto& id : needed) {
    const ImageRecord* r = manifest.find(id);
    Image img = read_png(images_root / r->path);
    if (img.width != r->width || img.height != r->height) {
      throw CurationError("image '" + id + "' does not match its manifest dimensions");
    }
    cache.emplace(id, std::move(img));
  }

  const auto rendered = render_cutmix(plans, [&cache](const std::string& id) -> const Image& { return cache.at(id); });

  DatasetManifest out = cutmix_manifest(manifest, plans, setting);
  std::filesystem::create_directories(images_root / "cutmix");
  parallel_for(static_cast<std::int64_t>(plans.size()), [&](std::int64_t i) {
    const auto k = static_cast<std::size_t>(i);
    write_png(images_root / "cutmix" / (cutmix_record_id(setting, k) + ".png"), rendered[k]);
  });
  return out;
}

}  // namespace t2i
