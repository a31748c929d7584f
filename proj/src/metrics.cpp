// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "t2i/errors.hpp"

namespace t2i {

FeatureSet::FeatureSet(std::size_t rows, std::size_t dims, std::vector<double> values)
    : n(rows), d(dims), data(std::move(values)) {
  if (data.size() != n * d) throw ArgumentError("feature data size does not match n x d");
}

GaussianStats fit_gaussian(const FeatureSet& f) {
  if (f.n < 2) throw ArgumentError("need at least 2 samples to fit a Gaussian");
  if (f.d < 1) throw ArgumentError("feature dimension must be >= 1");
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    if (!std::isfinite(f.data[i])) {
      throw NumericError("non-finite feature at row " + std::to_string(i / f.d) + ", column " +
                         std::to_string(i % f.d));
    }
  }
  GaussianStats s;
  s.d = f.d;
  s.mean.assign(f.d, 0.0);
  for (std::size_t i = 0; i < f.n; ++i) {
    for (std::size_t j = 0; j < f.d; ++j) s.mean[j] += f.data[i * f.d + j];
  }
  for (double& m : s.mean) m /= static_cast<double>(f.n);
  s.cov = kernels::centered_gram(f, s.mean);
  const double denom = static_cast<double>(f.n - 1);
  for (std::size_t a = 0; a < f.d; ++a) {
    for (std::size_t b = a; b < f.d; ++b) {
      const double v = 0.5 * (s.cov[a * f.d + b] + s.cov[b * f.d + a]) / denom;
      s.cov[a * f.d + b] = s.cov[b * f.d + a] = v;
    }
  }
  return s;
}

namespace {

using Mat = Eigen::MatrixXd;

Mat as_matrix(const std::vector<double>& v, std::size_t d) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

// Eigenvalues of a symmetrized PSD matrix with the small-negative clamp.
Eigen::SelfAdjointEigenSolver<Mat> psd_eigen(const Mat& m, Eigen::VectorXd& clamped) {
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  clamped = es.eigenvalues();
  const double scale = std::max(1.0, clamped.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    if (clamped[i] < -1e-8 * scale) {
      throw NumericError("matrix is not positive semi-definite (eigenvalue " + std::to_string(clamped[i]) + ")");
    }
    clamped[i] = std::max(0.0, clamped[i]);
  }
  return es;
}

}  // namespace

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.d != b.d || a.mean.size() != a.d || b.mean.size() != b.d || a.cov.size() != a.d * a.d ||
      b.cov.size() != b.d * b.d) {
    throw ArgumentError("Gaussian statistics have mismatched dimensions");
  }
  const std::size_t d = a.d;
  double mean_term = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = a.mean[i] - b.mean[i];
    mean_term += t * t;
  }
  const Mat s1 = as_matrix(a.cov, d);
  const Mat s2 = as_matrix(b.cov, d);

  Eigen::VectorXd lam1;
  const auto es1 = psd_eigen(s1, lam1);
  const Mat root1 = es1.eigenvectors() * lam1.cwiseSqrt().asDiagonal() * es1.eigenvectors().transpose();
  const Mat inner = root1 * s2 * root1;
  Eigen::VectorXd lam_inner;
  psd_eigen(inner, lam_inner);

  const double fd = mean_term + s1.trace() + s2.trace() - 2.0 * lam_inner.cwiseSqrt().sum();
  if (!std::isfinite(fd)) throw NumericError("non-finite Frechet distance");
  return std::max(0.0, fd);
}

PRDCReport prdc(const FeatureSet& real, const FeatureSet& fake, std::size_t k) {
  if (real.d != fake.d) throw ArgumentError("real and fake features have different dimensions");
  if (k < 1 || k >= std::min(real.n, fake.n)) {
    throw ArgumentError("k must satisfy 1 <= k < min(n_real, n_fake)");
  }
  const auto real_r = kernels::knn_radii(real, k);
  const auto fake_r = kernels::knn_radii(fake, k);
  const auto fake_in_real = kernels::ball_counts(fake, real, real_r);
  const auto real_in_fake = kernels::ball_counts(real, fake, fake_r);
  const auto nearest_fake = kernels::nearest_distance(real, fake);

  PRDCReport r;
  r.k = k;
  std::size_t precise = 0;
  std::size_t density_hits = 0;
  for (std::size_t c : fake_in_real) {
    precise += c > 0;
    density_hits += c;
  }
  std::size_t recalled = 0;
  for (std::size_t c : real_in_fake) recalled += c > 0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < real.n; ++i) covered += nearest_fake[i] <= real_r[i];

  r.precision = static_cast<double>(precise) / static_cast<double>(fake.n);
  r.recall = static_cast<double>(recalled) / static_cast<double>(real.n);
  r.density = static_cast<double>(density_hits) / (static_cast<double>(k) * static_cast<double>(fake.n));
  r.coverage = static_cast<double>(covered) / static_cast<double>(real.n);
  return r;
}

double paired_cosine_score(const FeatureSet& img, const FeatureSet& txt) {
  if (img.n != txt.n || img.d != txt.d) throw ArgumentError("paired feature sets must have equal n and d");
  if (img.n == 0) throw ArgumentError("paired feature sets are empty");
  double total = 0.0;
  for (std::size_t i = 0; i < img.n; ++i) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < img.d; ++j) {
      const double a = img.data[i * img.d + j];
      const double b = txt.data[i * txt.d + j];
      dot += a * b;
      na += a * a;
      nb += b * b;
    }
    if (na == 0.0 || nb == 0.0) throw NumericError("zero-norm feature row " + std::to_string(i));
    total += 100.0 * std::max(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0);
  }
  return total / static_cast<double>(img.n);
}

}  // namespace t2i
