// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "t2i/cutmix.hpp"
#include "t2i/errors.hpp"
#include "t2i/parallel.hpp"
#include "t2i/rng.hpp"
#include "t2i/toy_dataset.hpp"

using namespace t2i;

namespace {

Image ramp(int w, int h, float offset) {
  Image im(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) im.at(x, y) = std::fmod(offset + 0.01f * float(x + 3 * y), 1.0f);
  return im;
}

DatasetManifest two_class(std::size_t per_class) {
  DatasetManifest m;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    ImageRecord r;
    r.id = "r" + std::to_string(i);
    r.path = r.id + ".png";
    r.width = r.height = 32;
    r.class_label = i < per_class ? "dog" : "car";
    m.records.push_back(r);
  }
  return m;
}

}  // namespace

TEST_CASE("quarter on 256 is a corner square") {
  const std::set<std::pair<int, int>> corners{{0, 0}, {128, 0}, {0, 128}, {128, 128}};
  std::set<std::pair<int, int>> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto p = plan_placement(CutMixPattern::Quarter, 256, 256, s);
    CHECK(p.w == 128);
    CHECK(p.h == 128);
    CHECK(corners.count({p.x, p.y}) == 1);
    seen.insert({p.x, p.y});
  }
  CHECK(seen == corners);
  CHECK(coverage(plan_placement(CutMixPattern::Quarter, 256, 256, 1), 256, 256) == 0.25);
}

TEST_CASE("sixteenth avoids the central square") {
  CHECK(central_square_side(256, 256) == 81);
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto p = plan_placement(CutMixPattern::Sixteenth, 256, 256, s);
    CHECK(p.w == 64);
    CHECK(p.h == 64);
    // central square [88, 168.5) - hand-derived: 128 -/+ 40.5
    const bool apart = p.x + p.w <= 87.5 || p.x >= 168.5 || p.y + p.h <= 87.5 || p.y >= 168.5;
    CHECK(apart);
  }
  CHECK(coverage({0, 0, 64, 64}, 256, 256) == 0.0625);
  // the far corner slot clears the centre square at any aspect ratio
  for (int w = kMinCutMixSide; w <= 64; ++w)
    for (int h = kMinCutMixSide; h <= 64; h += 3) CHECK_NOTHROW(plan_placement(CutMixPattern::Sixteenth, w, h, 7));
  CHECK_NOTHROW(plan_placement(CutMixPattern::Sixteenth, 1024, 8, 1));
}

TEST_CASE("half and ninth geometry") {
  std::set<std::tuple<int, int, int, int>> halves;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto p = plan_placement(CutMixPattern::Half, 256, 256, s);
    CHECK(p.w * p.h == 32768);
    halves.insert({p.x, p.y, p.w, p.h});
    const auto n = plan_placement(CutMixPattern::Ninth, 256, 256, s);
    CHECK(n.w == 85);
    CHECK(n.h == 85);
    const bool flush = n.x == 0 || n.y == 0 || n.x + n.w == 256 || n.y + n.h == 256;
    CHECK(flush);
  }
  CHECK(halves.size() == 4);
  CHECK(std::fabs(coverage({0, 0, 85, 85}, 256, 256) - 1.0 / 9.0) < 0.01);
}

TEST_CASE("placement is a pure function of its inputs") {
  for (auto p : kSinglePatterns) {
    CHECK(plan_placement(p, 64, 48, 77) == plan_placement(p, 64, 48, 77));
  }
  CHECK_THROWS_AS(plan_placement(CutMixPattern::All, 64, 64, 0), ArgumentError);
  CHECK_THROWS_AS(plan_placement(CutMixPattern::Quarter, 7, 64, 0), GeometryError);
}

TEST_CASE("composite pastes only inside the placement") {
  const Image base = ramp(20, 12, 0.0f);
  const Image donor = ramp(7, 5, 0.5f);
  const Placement p{3, 2, 9, 6};
  const Image out = composite(base, donor, p);
  const Image patch = resize_bilinear(donor, p.w, p.h);
  for (int y = 0; y < base.height; ++y) {
    for (int x = 0; x < base.width; ++x) {
      const bool inside = x >= p.x && x < p.x + p.w && y >= p.y && y < p.y + p.h;
      CHECK(out.at(x, y) == (inside ? patch.at(x - p.x, y - p.y) : base.at(x, y)));
    }
  }
  CHECK(composite(base, donor, {0, 0, 20, 12}) == resize_bilinear(donor, 20, 12));
  CHECK(image_checksum(composite(base, donor, p)) == image_checksum(out));
  CHECK_THROWS_AS(composite(base, Image{}, p), GeometryError);
  CHECK_THROWS_AS(composite(base, donor, {15, 0, 9, 6}), GeometryError);
}

TEST_CASE("half keeps the donor at full resolution") {
  const Image base = ramp(16, 16, 0.0f);
  const Image donor = ramp(16, 16, 0.3f);
  CutMixPlan plan;
  plan.pattern = CutMixPattern::Half;
  plan.placement = {8, 0, 8, 16};
  const Image out = apply_plan(base, donor, plan);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(out.at(x, y) == (x >= 8 ? donor.at(x, y) : base.at(x, y)));
}

TEST_CASE("plans pair different classes, round-robin for all") {
  const auto m = two_class(10);
  const auto plans = plan_cutmix(m, CutMixPattern::All, 402, 5);
  std::map<CutMixPattern, int> counts;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = plans[i];
    CHECK(p.pattern == kSinglePatterns[i % 4]);
    CHECK(*m.find(p.base_id)->class_label != *m.find(p.donor_id)->class_label);
    ++counts[p.pattern];
  }
  for (auto [p, c] : counts) CHECK((c == 100 || c == 101));

  auto one_class = two_class(3);
  for (auto& r : one_class.records) r.class_label = "dog";
  CHECK_THROWS_AS(plan_cutmix(one_class, CutMixPattern::Half, 4, 0), CurationError);
}

TEST_CASE("plans do not depend on the thread count") {
  const auto m = two_class(12);
  std::vector<CutMixPlan> a, b;
  {
    ThreadCountGuard g(1);
    a = plan_cutmix(m, CutMixPattern::All, 97, 3);
  }
  {
    ThreadCountGuard g(4);
    b = plan_cutmix(m, CutMixPattern::All, 97, 3);
  }
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].base_id == b[i].base_id);
    CHECK(a[i].donor_id == b[i].donor_id);
    CHECK(a[i].placement == b[i].placement);
  }
}

TEST_CASE("curate writes images and provenance") {
  const auto dir = std::filesystem::temp_directory_path() / "t2i_cutmix_curate";
  std::filesystem::remove_all(dir);
  const auto toy = write_toy_dataset(dir, 4, 1);
  const auto m = curate_cutmix(toy.manifest, dir, CutMixPattern::Half, 10, 9);
  CHECK(validate_manifest(m).empty());
  const auto counts = pattern_counts(m);
  REQUIRE(counts.size() == 1);
  CHECK(counts.at(CutMixPattern::Half) == 10);
  for (const auto& r : m.records) {
    if (r.source != ImageSource::CutMix) continue;
    CHECK(std::filesystem::exists(dir / r.path));
    CHECK(*m.find(r.provenance->base_id)->class_label != *m.find(*r.provenance->donor_id)->class_label);
  }
  CHECK(manifest_to_string(curate_cutmix(toy.manifest, dir, CutMixPattern::Half, 10, 9)) == manifest_to_string(m));
  std::filesystem::remove_all(dir);
}
