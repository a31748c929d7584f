// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "t2i/errors.hpp"
#include "t2i/rng.hpp"

namespace t2i {

void validate(const NoiseSchedule& schedule, const GateParams& gate) {
  if (schedule.horizon < 1) throw ArgumentError("horizon T must be >= 1");
  if (gate.tau < 0 || gate.tau > schedule.horizon) throw ArgumentError("tau must lie in [0, T]");
  if (!(gate.aug_prob >= 0.0 && gate.aug_prob <= 1.0)) throw ArgumentError("aug_prob must lie in [0, 1]");
}

double gamma(const NoiseSchedule& schedule, double t) {
  if (!(t >= 0.0 && t <= schedule.horizon)) {
    throw ArgumentError("timestep " + std::to_string(t) + " outside [0, " + std::to_string(schedule.horizon) + "]");
  }
  const double c = std::cos((t / schedule.horizon) * std::numbers::pi / 2.0);
  return std::clamp(c * c, kGammaFloor, 1.0);
}

std::vector<float> noise(std::span<const float> x0, double t, std::span<const float> eps,
                         const NoiseSchedule& schedule) {
  if (x0.size() != eps.size()) throw ArgumentError("x0 and eps shapes differ");
  const double g = gamma(schedule, t);
  const double a = std::sqrt(g);
  const double b = std::sqrt(1.0 - g);
  std::vector<float> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out[i] = static_cast<float>(a * x0[i] + b * eps[i]);
  return out;
}

SampleSource sample_source(int t, const GateParams& gate, std::uint64_t seed, const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.horizon) throw ArgumentError("timestep must lie in (0, T]");
  if (t <= gate.tau) return SampleSource::Original;
  Rng rng(seed);
  return rng.uniform01() < gate.aug_prob ? SampleSource::Augmented : SampleSource::Original;
}

bool AugmentedSource::empty(const Dataset& original) const {
  switch (kind) {
    case Kind::None: return true;
    case Kind::Curated: return curated == nullptr || curated->empty();
    case Kind::Crop: return original.empty();
  }
  return true;
}

}  // namespace t2i
