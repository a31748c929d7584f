// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "t2i/cropaug.hpp"

namespace t2i {

inline constexpr double kGammaFloor = 1e-5;

struct NoiseSchedule {
  int horizon = 1000;  // T
};

/// Timestep-gate parameters: augmentation only for t > tau, with probability aug_prob.
struct GateParams {
  int tau = 400;
  double aug_prob = 0.5;
};

/// Throws ArgumentError unless T >= 1, 0 <= tau <= T and 0 <= aug_prob <= 1.
void validate(const NoiseSchedule& schedule, const GateParams& gate);

/// Cosine schedule cos^2((t/T) * pi/2), clamped to [1e-5, 1]. t in [0, T].
double gamma(const NoiseSchedule& schedule, double t);

/// sqrt(gamma) * x0 + sqrt(1 - gamma) * eps, elementwise.
std::vector<float> noise(std::span<const float> x0, double t, std::span<const float> eps,
                         const NoiseSchedule& schedule);

enum class SampleSource { Original, Augmented };

/// Original when t <= tau, otherwise a Bernoulli(aug_prob) draw from the seed.
SampleSource sample_source(int t, const GateParams& gate, std::uint64_t seed, const NoiseSchedule& schedule = {});

struct Example {
  std::vector<float> pixels;  // interleaved, width * height * channels
  std::string caption;
};

struct Dataset {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<Example> items;

  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width) * height * channels; }
  bool empty() const noexcept { return items.empty(); }
};

/// Where augmented samples come from: a curated dataset (cutmix) or online
/// crops of the original dataset, which carry a token mask and a crop prefix.
struct AugmentedSource {
  enum class Kind { None, Curated, Crop };
  Kind kind = Kind::None;
  const Dataset* curated = nullptr;
  int grid_w = 0;
  int grid_h = 0;

  static AugmentedSource none() { return {}; }
  static AugmentedSource from(const Dataset& d) { return {Kind::Curated, &d, 0, 0}; }
  static AugmentedSource crops(int grid_w, int grid_h) { return {Kind::Crop, nullptr, grid_w, grid_h}; }

  bool empty(const Dataset& original) const;
};

struct TrainSample {
  std::vector<float> x_t;
  std::vector<float> eps;
  std::string caption;
  int t = 1;
  SampleSource source = SampleSource::Original;
  std::optional<TokenMask> mask;

  friend bool operator==(const TrainSample&, const TrainSample&) = default;
};

/*!
 * One mini-batch following the gated augmentation procedure: per slot draw
 * t ~ U{1..T} and an original pair; if t > tau flip Bernoulli(aug_prob) and
 * on success redraw the pair from the augmented source; then draw eps and
 * noise. Each slot uses its own derived streams (t, original, gate,
 * augmented, eps), so the result is independent of thread count and the
 * eps of a slot does not depend on whether its gate fired.
 */
std::vector<TrainSample> build_batch(const Dataset& original, const AugmentedSource& augmented,
                                     const GateParams& gate, const NoiseSchedule& schedule, std::size_t m,
                                     std::uint64_t seed);

/// Same result, sequential loop. Kept as the reference for build_batch.
std::vector<TrainSample> build_batch_serial(const Dataset& original, const AugmentedSource& augmented,
                                            const GateParams& gate, const NoiseSchedule& schedule,
                                            std::size_t m, std::uint64_t seed);

}  // namespace t2i
