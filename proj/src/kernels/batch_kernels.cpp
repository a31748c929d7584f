// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Mini-batch construction: one independent slot per index.

#include <cmath>

#include "t2i/errors.hpp"
#include "t2i/parallel.hpp"
#include "t2i/rng.hpp"
#include "t2i/schedule.hpp"

namespace t2i {

namespace {

enum Stream : std::uint64_t { kTimestep = 0, kOriginal = 1, kGate = 2, kAugmented = 3, kEps = 4, kCrop = 5 };

void check_batch_inputs(const Dataset& original, const AugmentedSource& augmented, const GateParams& gate,
                        const NoiseSchedule& schedule, std::size_t m) {
  validate(schedule, gate);
  if (m < 1) throw ArgumentError("batch size must be >= 1");
  if (original.empty()) throw ConfigError("original dataset is empty");
  if (gate.aug_prob > 0.0 && gate.tau < schedule.horizon && augmented.empty(original)) {
    throw ConfigError("aug_prob > 0 but the augmented dataset is empty");
  }
  if (augmented.kind == AugmentedSource::Kind::Curated && augmented.curated != nullptr &&
      augmented.curated->pixel_count() != original.pixel_count()) {
    throw ConfigError("augmented and original datasets have different image shapes");
  }
}

TrainSample fill_slot(const Dataset& original, const AugmentedSource& augmented, const GateParams& gate,
                      const NoiseSchedule& schedule, const Rng& slot) {
  TrainSample s;
  s.t = 1 + static_cast<int>(slot.split(kTimestep).uniform_int(static_cast<std::uint64_t>(schedule.horizon)));

  Rng pick = slot.split(kOriginal);
  const Example* ex = &original.items[pick.uniform_int(original.items.size())];

  s.source = sample_source(s.t, gate, slot.split(kGate).seed(), schedule);
  if (s.source == SampleSource::Augmented) {
    Rng aug = slot.split(kAugmented);
    if (augmented.kind == AugmentedSource::Kind::Curated) {
      ex = &augmented.curated->items[aug.uniform_int(augmented.curated->items.size())];
      s.caption = ex->caption;
    } else {
      ex = &original.items[aug.uniform_int(original.items.size())];
      const CropSpec crop = sample_crop(slot.split(kCrop).seed());
      s.caption = crop_tokens(crop) + ex->caption;
      s.mask = patch_mask(crop, augmented.grid_w, augmented.grid_h);
    }
  } else {
    s.caption = ex->caption;
  }

  Rng eps_rng = slot.split(kEps);
  s.eps.resize(ex->pixels.size());
  for (auto& e : s.eps) e = static_cast<float>(eps_rng.normal());
  s.x_t = noise(ex->pixels, s.t, s.eps, schedule);
  return s;
}

}  // namespace

std::vector<TrainSample> build_batch_serial(const Dataset& original, const AugmentedSource& augmented,
                                            const GateParams& gate, const NoiseSchedule& schedule,
                                            std::size_t m, std::uint64_t seed) {
  check_batch_inputs(original, augmented, gate, schedule, m);
  const Rng root(seed);
  std::vector<TrainSample> batch;
  batch.reserve(m);
  for (std::size_t i = 0; i < m; ++i) batch.push_back(fill_slot(original, augmented, gate, schedule, root.split(i)));
  return batch;
}

std::vector<TrainSample> build_batch(const Dataset& original, const AugmentedSource& augmented,
                                     const GateParams& gate, const NoiseSchedule& schedule, std::size_t m,
                                     std::uint64_t seed) {
  check_batch_inputs(original, augmented, gate, schedule, m);
  const Rng root(seed);
  std::vector<TrainSample> batch(m);
  parallel_for(static_cast<std::int64_t>(m), [&](std::int64_t i) {
    const auto k = static_cast<std::uint64_t>(i);
    batch[k] = fill_slot(original, augmented, gate, schedule, root.split(k));
  });
  return batch;
}

}  // namespace t2i
