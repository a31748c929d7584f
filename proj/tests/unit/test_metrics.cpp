// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "linalg_oracle.hpp"
#include "prdc_oracle.hpp"
#include "t2i/errors.hpp"
#include "t2i/feature_io.hpp"
#include "t2i/metrics.hpp"
#include "t2i/parallel.hpp"
#include "t2i/rng.hpp"

using namespace t2i;

namespace {

FeatureSet random_set(std::size_t n, std::size_t d, std::uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  FeatureSet f(n, d);
  for (auto& v : f.data) v = rng.normal() + shift;
  return f;
}

oracle::Rows rows(const FeatureSet& f) {
  oracle::Rows r(f.n);
  for (std::size_t i = 0; i < f.n; ++i) r[i].assign(f.row(i).begin(), f.row(i).end());
  return r;
}

}  // namespace

TEST_CASE("gaussian fit") {
  const auto g = fit_gaussian(FeatureSet(2, 2, {0, 0, 2, 0}));
  CHECK(g.mean == std::vector<double>{1, 0});
  CHECK(g.cov == std::vector<double>{2, 0, 0, 0});

  const auto c = fit_gaussian(FeatureSet(3, 2, {1, 2, 1, 2, 1, 2}));
  for (double v : c.cov) CHECK(v == 0.0);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_set(40 + s, 5, s, 3.0);
    const auto fit = fit_gaussian(f);
    std::vector<double> mu;
    const auto ref = oracle::covariance(rows(f), &mu);
    for (std::size_t i = 0; i < 25; ++i) CHECK(std::fabs(fit.cov[i] - ref.a[i]) <= 1e-10);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(std::fabs(fit.mean[i] - mu[i]) <= 1e-12);
      for (std::size_t j = 0; j < 5; ++j) CHECK(fit.cov[i * 5 + j] == fit.cov[j * 5 + i]);
    }
  }

  CHECK_THROWS_AS(fit_gaussian(FeatureSet(1, 3)), ArgumentError);
  CHECK_THROWS_AS(fit_gaussian(FeatureSet(2, 1, {0.0, NAN})), NumericError);
}

TEST_CASE("frechet distance") {
  const auto x = fit_gaussian(random_set(100, 6, 1));
  CHECK(frechet_distance(x, x) <= 1e-8);

  GaussianStats a{{0.0}, {1.0}, 1}, b{{1.0}, {1.0}, 1};
  CHECK(std::fabs(frechet_distance(a, b) - 1.0) <= 1e-9);
  GaussianStats c{{0.0}, {4.0}, 1};
  CHECK(frechet_distance(a, c) == doctest::Approx(1.0).epsilon(1e-12));  // (2 - 1)^2

  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto p = fit_gaussian(random_set(30, 5, 100 + s));
    const auto q = fit_gaussian(random_set(30, 5, 200 + s, 0.5));
    oracle::Mat sp(5), sq(5);
    sp.a = p.cov;
    sq.a = q.cov;
    const double ref = oracle::frechet(p.mean, sp, q.mean, sq);
    CHECK(std::fabs(frechet_distance(p, q) - ref) <= 1e-6);
    CHECK(std::fabs(frechet_distance(p, q) - frechet_distance(q, p)) <= 1e-6);
    CHECK(frechet_distance(p, q) >= 0.0);
  }

  // rank-deficient covariance still works
  const auto flat = fit_gaussian(FeatureSet(3, 3, {0, 0, 0, 1, 1, 1, 2, 2, 2}));
  CHECK(frechet_distance(flat, flat) <= 1e-8);

  GaussianStats bad{{0.0, 0.0}, {-1.0, 0.0, 0.0, 1.0}, 2};
  CHECK_THROWS_AS(frechet_distance(bad, bad), NumericError);
  CHECK_THROWS_AS(frechet_distance(a, bad), ArgumentError);
}

TEST_CASE("prdc edge cases") {
  const auto real = random_set(20, 3, 5);
  const auto same = prdc(real, real, 3);
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  CHECK(same.coverage == 1.0);

  const auto far = prdc(real, random_set(20, 3, 6, 1000.0), 3);
  CHECK(far.precision == 0.0);
  CHECK(far.density == 0.0);
  CHECK(far.coverage == 0.0);

  CHECK_THROWS_AS(prdc(real, real, 0), ArgumentError);
  CHECK_THROWS_AS(prdc(real, random_set(3, 3, 1), 3), ArgumentError);
  CHECK_THROWS_AS(prdc(real, random_set(10, 2, 1), 3), ArgumentError);
}

TEST_CASE("prdc equals brute force") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto real = random_set(32, 4, 10 + s);
    const auto fake = random_set(32, 4, 50 + s, 0.3);
    const auto got = prdc(real, fake, 3);
    const auto ref = oracle::prdc(rows(real), rows(fake), 3);
    CHECK(got.precision == ref.precision);
    CHECK(got.recall == ref.recall);
    CHECK(got.density == ref.density);
    CHECK(got.coverage == ref.coverage);
  }
}

TEST_CASE("duplicate fake point moves precision by at most one step") {
  const auto real = random_set(30, 3, 1);
  auto fake = random_set(30, 3, 2, 0.8);
  const double before = prdc(real, fake, 3).precision;
  fake.data.insert(fake.data.end(), fake.data.begin(), fake.data.begin() + 3);
  fake.n += 1;
  CHECK(std::fabs(prdc(real, fake, 3).precision - before) <= 1.0 / double(fake.n) + 1e-15);
}

TEST_CASE("distance kernels match their serial references") {
  const auto a = random_set(70, 6, 1), b = random_set(55, 6, 2);
  const auto ra = kernels::knn_radii_serial(a, 4);
  const auto mean = fit_gaussian(a).mean;
  for (int threads : {1, 3}) {
    ThreadCountGuard g(threads);
    CHECK(kernels::knn_radii(a, 4) == ra);
    CHECK(kernels::ball_counts(b, a, ra) == kernels::ball_counts_serial(b, a, ra));
    CHECK(kernels::nearest_distance(b, a) == kernels::nearest_distance_serial(b, a));
    CHECK(kernels::centered_gram(a, mean) == kernels::centered_gram_serial(a, mean));
  }
}

TEST_CASE("paired cosine") {
  const FeatureSet img(2, 2, {1, 0, 0, 2});
  CHECK(paired_cosine_score(img, img) == doctest::Approx(100.0));
  CHECK(paired_cosine_score(img, FeatureSet(2, 2, {0, 1, 3, 0})) == 0.0);
  CHECK(paired_cosine_score(img, FeatureSet(2, 2, {-1, 0, 0, -1})) == 0.0);
  try {
    paired_cosine_score(img, FeatureSet(2, 2, {1, 0, 0, 0}));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("feature file round trip") {
  const auto f = random_set(7, 3, 4);
  const auto bytes = encode_features(f);
  REQUIRE(bytes.size() == 13 + 7 * 3 * 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "FEAT");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 7);
  CHECK(bytes[9] == 3);
  const auto back = decode_features(bytes);
  CHECK(back.n == 7);
  CHECK(back.d == 3);
  for (std::size_t i = 0; i < f.data.size(); ++i) CHECK(back.data[i] == double(float(f.data[i])));

  auto trunc = bytes;
  trunc.pop_back();
  CHECK_THROWS(decode_features(trunc));
  auto wrong = bytes;
  wrong[4] = 2;
  CHECK_THROWS(decode_features(wrong));

  const auto path = std::filesystem::temp_directory_path() / "t2i_feat_test.feat";
  write_features(path, f);
  CHECK(read_features(path).data == back.data);
  std::filesystem::remove(path);
}
