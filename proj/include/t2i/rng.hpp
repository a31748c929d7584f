// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace t2i {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derive an independent child seed from (seed, key). Used for per-index and
/// per-role streams so that results never depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(seed ^ mix64(key + 0x9e3779b97f4a7c15ull));
}

/*!
 * Counter-based splittable generator.
 *
 * The state is a 64-bit counter; each draw returns mix64 of the advanced
 * counter (the SplitMix64 stream). split(key) yields a child generator whose
 * seed depends only on the parent's seed and the key, never on how many
 * values the parent has already produced.
 */
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  constexpr std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0. Unbiased (Lemire's method).
  std::uint64_t uniform_int(std::uint64_t n) noexcept;

  /// Standard normal via Box-Muller; no cached second value.
  double normal() noexcept;

  constexpr Rng split(std::uint64_t key) const noexcept { return Rng(derive_seed(seed_, key)); }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace t2i
