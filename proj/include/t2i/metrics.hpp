// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace t2i {

/// n x d feature matrix, row-major.
struct FeatureSet {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> data;

  FeatureSet() = default;
  FeatureSet(std::size_t rows, std::size_t dims) : n(rows), d(dims), data(rows * dims, 0.0) {}
  FeatureSet(std::size_t rows, std::size_t dims, std::vector<double> values);

  std::span<const double> row(std::size_t i) const { return {data.data() + i * d, d}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * d, d}; }
};

struct GaussianStats {
  std::vector<double> mean;  // d
  std::vector<double> cov;   // d x d, row-major, symmetric
  std::size_t d = 0;
};

/// Sample mean and unbiased covariance (n - 1), symmetrized.
/// Throws ArgumentError for n < 2 and NumericError for non-finite input.
GaussianStats fit_gaussian(const FeatureSet& features);

/*!
 * Frechet distance between two Gaussians via the symmetric form
 *   |mu1 - mu2|^2 + tr S1 + tr S2 - 2 tr (S1^1/2 S2 S1^1/2)^1/2
 * with eigendecomposition square roots. Eigenvalues in [-tol, 0) are
 * clamped to zero, tol = 1e-8 * max(1, |lambda|max); anything below throws
 * NumericError. The result is clamped to >= 0.
 */
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

struct PRDCReport {
  double precision = 0.0;
  double recall = 0.0;
  double density = 0.0;
  double coverage = 0.0;
  std::size_t k = 0;
};

/*!
 * k-NN manifold metrics with Euclidean distance. A point lies inside a ball
 * when its distance is <= the centre's k-th neighbour radius (self excluded).
 * Requires 1 <= k < min(n_real, n_fake) and equal d.
 */
PRDCReport prdc(const FeatureSet& real, const FeatureSet& fake, std::size_t k);

/// Mean over rows of 100 * max(cos(image_i, text_i), 0).
/// Throws NumericError naming the first zero-norm row.
double paired_cosine_score(const FeatureSet& image_feats, const FeatureSet& text_feats);

/// Straightforward Euclidean distance, summed in index order.
inline double euclidean(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

namespace kernels {

/// Distance from each row to its k-th nearest other row.
std::vector<double> knn_radii(const FeatureSet& set, std::size_t k);
std::vector<double> knn_radii_serial(const FeatureSet& set, std::size_t k);

/// For each query row, how many centres c satisfy dist(q, c) <= radii[c].
std::vector<std::size_t> ball_counts(const FeatureSet& queries, const FeatureSet& centers,
                                     std::span<const double> radii);
std::vector<std::size_t> ball_counts_serial(const FeatureSet& queries, const FeatureSet& centers,
                                            std::span<const double> radii);

/// For each row of @p from, the distance to its nearest row of @p to.
std::vector<double> nearest_distance(const FeatureSet& from, const FeatureSet& to);
std::vector<double> nearest_distance_serial(const FeatureSet& from, const FeatureSet& to);

/// Centered Gram matrix sum_i (x_i - mean)(x_i - mean)^T, d x d.
std::vector<double> centered_gram(const FeatureSet& set, std::span<const double> mean);
std::vector<double> centered_gram_serial(const FeatureSet& set, std::span<const double> mean);

}  // namespace kernels

}  // namespace t2i
