// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Pairwise-distance kernels for PRDC. Each output entry is computed by one
// iteration with the same arithmetic in both variants, so serial and OpenMP
// results are bit-identical.

#include <algorithm>
#include <cstdint>
#include <limits>

#include "t2i/metrics.hpp"

namespace t2i::kernels {

namespace {

double kth_radius(const FeatureSet& set, std::size_t i, std::size_t k, std::vector<double>& scratch) {
  scratch.clear();
  for (std::size_t j = 0; j < set.n; ++j) {
    if (j != i) scratch.push_back(euclidean(&set.data[i * set.d], &set.data[j * set.d], set.d));
  }
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
  return scratch[k - 1];
}

std::size_t count_in_balls(const FeatureSet& q, std::size_t i, const FeatureSet& c, std::span<const double> radii) {
  std::size_t hits = 0;
  for (std::size_t j = 0; j < c.n; ++j) {
    if (euclidean(&q.data[i * q.d], &c.data[j * c.d], q.d) <= radii[j]) ++hits;
  }
  return hits;
}

double nearest(const FeatureSet& from, std::size_t i, const FeatureSet& to) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < to.n; ++j) best = std::min(best, euclidean(&from.data[i * from.d], &to.data[j * to.d], from.d));
  return best;
}

}  // namespace

std::vector<double> knn_radii_serial(const FeatureSet& set, std::size_t k) {
  std::vector<double> out(set.n);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < set.n; ++i) out[i] = kth_radius(set, i, k, scratch);
  return out;
}

std::vector<double> knn_radii(const FeatureSet& set, std::size_t k) {
  std::vector<double> out(set.n);
  const auto n = static_cast<std::int64_t>(set.n);
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = kth_radius(set, static_cast<std::size_t>(i), k, scratch);
  }
  return out;
}

std::vector<std::size_t> ball_counts_serial(const FeatureSet& queries, const FeatureSet& centers,
                                            std::span<const double> radii) {
  std::vector<std::size_t> out(queries.n);
  for (std::size_t i = 0; i < queries.n; ++i) out[i] = count_in_balls(queries, i, centers, radii);
  return out;
}

std::vector<std::size_t> ball_counts(const FeatureSet& queries, const FeatureSet& centers,
                                     std::span<const double> radii) {
  std::vector<std::size_t> out(queries.n);
  const auto n = static_cast<std::int64_t>(queries.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = count_in_balls(queries, static_cast<std::size_t>(i), centers, radii);
  }
  return out;
}

std::vector<double> nearest_distance_serial(const FeatureSet& from, const FeatureSet& to) {
  std::vector<double> out(from.n);
  for (std::size_t i = 0; i < from.n; ++i) out[i] = nearest(from, i, to);
  return out;
}

std::vector<double> nearest_distance(const FeatureSet& from, const FeatureSet& to) {
  std::vector<double> out(from.n);
  const auto n = static_cast<std::int64_t>(from.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = nearest(from, static_cast<std::size_t>(i), to);
  return out;
}

}  // namespace t2i::kernels
