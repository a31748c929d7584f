// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>

#include "t2i/metrics.hpp"

namespace t2i::kernels {

namespace {

// Entry (a, b) summed over rows in index order.
double gram_entry(const FeatureSet& set, std::span<const double> mean, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = 0; i < set.n; ++i) {
    s += (set.data[i * set.d + a] - mean[a]) * (set.data[i * set.d + b] - mean[b]);
  }
  return s;
}

}  // namespace

std::vector<double> centered_gram_serial(const FeatureSet& set, std::span<const double> mean) {
  const std::size_t d = set.d;
  std::vector<double> g(d * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) g[a * d + b] = g[b * d + a] = gram_entry(set, mean, a, b);
  }
  return g;
}

std::vector<double> centered_gram(const FeatureSet& set, std::span<const double> mean) {
  const std::size_t d = set.d;
  std::vector<double> g(d * d);
  const auto rows = static_cast<std::int64_t>(d);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ai = 0; ai < rows; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    for (std::size_t b = a; b < d; ++b) g[a * d + b] = g[b * d + a] = gram_entry(set, mean, a, b);
  }
  return g;
}

}  // namespace t2i::kernels
