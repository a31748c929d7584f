// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Brute-force k-NN manifold metrics: full distance tables, sort, count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct PRDC {
  double precision, recall, density, coverage;
};

using Rows = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline std::vector<double> kth_radii(const Rows& x, std::size_t k) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> ds;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i) ds.push_back(dist(x[i], x[j]));
    std::sort(ds.begin(), ds.end());
    r[i] = ds[k - 1];
  }
  return r;
}

inline PRDC prdc(const Rows& real, const Rows& fake, std::size_t k) {
  const auto rr = kth_radii(real, k);
  const auto fr = kth_radii(fake, k);
  const std::size_t n = real.size(), m = fake.size();

  std::size_t prec = 0, dens = 0;
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) inside += dist(fake[j], real[i]) <= rr[i] ? 1 : 0;
    prec += inside > 0 ? 1 : 0;
    dens += inside;
  }
  std::size_t rec = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool hit = false;
    for (std::size_t j = 0; j < m && !hit; ++j) hit = dist(real[i], fake[j]) <= fr[j];
    rec += hit ? 1 : 0;
  }
  std::size_t cov = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < m; ++j) best = std::min(best, dist(real[i], fake[j]));
    cov += best <= rr[i] ? 1 : 0;
  }
  return {double(prec) / double(m), double(rec) / double(n), double(dens) / (double(k) * double(m)),
          double(cov) / double(n)};
}

}  // namespace oracle
