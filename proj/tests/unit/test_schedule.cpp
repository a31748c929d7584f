// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "t2i/errors.hpp"
#include "t2i/parallel.hpp"
#include "t2i/rng.hpp"
#include "t2i/schedule.hpp"

using namespace t2i;

namespace {

Dataset constant_dataset(float value, const std::string& caption, std::size_t n = 3) {
  Dataset d;
  d.width = d.height = 4;
  for (std::size_t i = 0; i < n; ++i) d.items.push_back({std::vector<float>(16, value + 0.01f * float(i)), caption});
  return d;
}

}  // namespace

TEST_CASE("cosine schedule endpoints") {
  const NoiseSchedule s{1000};
  CHECK(std::fabs(gamma(s, 0) - 1.0) <= 1e-12);
  CHECK(gamma(s, 500) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gamma(s, 1000) == kGammaFloor);
  CHECK(gamma(s, 1000) <= 1e-4);
  for (int t = 1; t <= 1000; ++t) CHECK(gamma(s, t) <= gamma(s, t - 1));
  // strictly decreasing until the floor takes over
  for (int t = 1; t <= 990; ++t) CHECK(gamma(s, t) < gamma(s, t - 1));
  CHECK_THROWS_AS(gamma(s, -1), ArgumentError);
  CHECK_THROWS_AS(gamma(s, 1001), ArgumentError);
}

TEST_CASE("forward noising") {
  const NoiseSchedule s{1000};
  Rng rng(3);
  std::vector<float> x0(64), eps(64);
  for (auto& v : x0) v = float(rng.uniform01() * 2 - 1);
  for (auto& v : eps) v = float(rng.normal());

  CHECK(noise(x0, 0, eps, s) == x0);

  const auto xt = noise(x0, 1000, eps, s);
  double max_x0 = 0, max_eps = 0, worst = 0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    max_x0 = std::max(max_x0, double(std::fabs(x0[i])));
    max_eps = std::max(max_eps, double(std::fabs(eps[i])));
    worst = std::max(worst, double(std::fabs(xt[i] - eps[i])));
  }
  const double bound = std::sqrt(1e-5) * max_x0 + std::fabs(std::sqrt(1 - 1e-5) - 1) * max_eps;
  CHECK(worst <= bound + 1e-6);  // float output rounding

  // linearity in x0
  std::vector<float> zero(64, 0.0f), scaled(64);
  for (std::size_t i = 0; i < 64; ++i) scaled[i] = 3.0f * x0[i];
  const auto a = noise(scaled, 250, eps, s);
  const auto b = noise(zero, 250, eps, s);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(a[i] - b[i] == doctest::Approx(std::sqrt(gamma(s, 250)) * scaled[i]).epsilon(1e-5));

  CHECK_THROWS_AS(noise(x0, 10, std::vector<float>(3), s), ArgumentError);
}

TEST_CASE("noised variance matches 1 - gamma") {
  const NoiseSchedule s{1000};
  const std::vector<float> x0{0.7f};
  for (int t : {100, 500, 900}) {
    Rng rng(static_cast<std::uint64_t>(t));
    double sum = 0, sum2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const std::vector<float> e{float(rng.normal())};
      const double v = noise(x0, t, e, s)[0];
      sum += v;
      sum2 += v * v;
    }
    const double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(1 - gamma(s, t)).epsilon(0.02));
  }
}

TEST_CASE("source gate") {
  const NoiseSchedule s{1000};
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    CHECK(sample_source(400, {400, 1.0}, seed, s) == SampleSource::Original);
    CHECK(sample_source(1 + int(seed % 1000), {0, 1.0}, seed, s) == SampleSource::Augmented);
  }
  std::size_t aug = 0;
  const int n = 100000;
  Rng rng(17);
  for (int i = 0; i < n; ++i) {
    const int t = 1 + int(rng.uniform_int(1000));
    aug += sample_source(t, {400, 0.5}, rng.next_u64(), s) == SampleSource::Augmented;
  }
  CHECK(std::fabs(double(aug) / n - 0.5 * (1.0 - 400.0 / 1000.0)) <= 0.01);
  CHECK_THROWS_AS(sample_source(0, {400, 0.5}, 1, s), ArgumentError);
  CHECK_THROWS_AS(validate(s, {1001, 0.5}), ArgumentError);
  CHECK_THROWS_AS(validate(s, {10, 1.5}), ArgumentError);
}

TEST_CASE("batch builder follows the gate") {
  const NoiseSchedule s{1000};
  const auto orig = constant_dataset(-0.5f, "orig");
  const auto cm = constant_dataset(0.5f, "cutmix");

  const auto all_orig = build_batch(orig, AugmentedSource::from(cm), {1000, 1.0}, s, 256, 4);
  for (const auto& x : all_orig) CHECK(x.source == SampleSource::Original);

  const auto b = build_batch(orig, AugmentedSource::from(cm), {400, 0.5}, s, 4096, 8);
  std::size_t aug = 0;
  for (const auto& x : b) {
    CHECK(x.t >= 1);
    CHECK(x.t <= 1000);
    if (x.t <= 400) CHECK(x.source == SampleSource::Original);
    CHECK(x.caption == (x.source == SampleSource::Augmented ? "cutmix" : "orig"));
    CHECK_FALSE(x.mask.has_value());
    aug += x.source == SampleSource::Augmented;
  }
  CHECK(std::fabs(double(aug) / 4096 - 0.3) < 0.03);
}

TEST_CASE("aug_prob zero equals plain sampling") {
  const NoiseSchedule s{1000};
  const auto orig = constant_dataset(-0.5f, "orig", 7);
  const auto cm = constant_dataset(0.5f, "cutmix");
  const auto gated_off = build_batch(orig, AugmentedSource::from(cm), {400, 0.0}, s, 300, 21);
  const auto plain = build_batch(orig, AugmentedSource::none(), {1000, 0.0}, s, 300, 21);
  CHECK(gated_off == plain);
}

TEST_CASE("crop branch carries tokens and masks") {
  const NoiseSchedule s{1000};
  const auto orig = constant_dataset(0.1f, "a dog");
  const auto b = build_batch(orig, AugmentedSource::crops(4, 4), {0, 0.5}, s, 512, 2);
  std::size_t aug = 0;
  for (const auto& x : b) {
    if (x.source == SampleSource::Augmented) {
      ++aug;
      REQUIRE(x.mask.has_value());
      const auto parsed = parse_crop_tokens(x.caption);
      REQUIRE(parsed.has_value());
      CHECK(parsed->caption == "a dog");
      CHECK(x.mask->grid_w == 4);
    } else {
      CHECK_FALSE(x.mask.has_value());
      CHECK(x.caption == "a dog");
    }
  }
  CHECK(std::fabs(double(aug) / 512 - 0.5) < 0.07);
}

TEST_CASE("batch errors") {
  const NoiseSchedule s{1000};
  const auto orig = constant_dataset(0.0f, "x");
  Dataset empty;
  CHECK_THROWS_AS(build_batch(orig, AugmentedSource::none(), {400, 0.5}, s, 8, 0), ConfigError);
  CHECK_THROWS_AS(build_batch(orig, AugmentedSource::from(empty), {400, 0.5}, s, 8, 0), ConfigError);
  CHECK_THROWS_AS(build_batch(empty, AugmentedSource::none(), {400, 0.0}, s, 8, 0), ConfigError);
  CHECK_NOTHROW(build_batch(orig, AugmentedSource::none(), {400, 0.0}, s, 8, 0));
  CHECK_THROWS_AS(build_batch(orig, AugmentedSource::none(), {400, 0.0}, s, 0, 0), ArgumentError);
}

TEST_CASE("parallel batch equals the serial reference") {
  const NoiseSchedule s{1000};
  const auto orig = constant_dataset(-0.5f, "orig", 5);
  const auto cm = constant_dataset(0.5f, "cutmix", 4);
  const auto ref = build_batch_serial(orig, AugmentedSource::from(cm), {400, 0.5}, s, 333, 77);
  for (int threads : {1, 2, 4}) {
    ThreadCountGuard g(threads);
    CHECK(build_batch(orig, AugmentedSource::from(cm), {400, 0.5}, s, 333, 77) == ref);
  }
  const auto crop_ref = build_batch_serial(orig, AugmentedSource::crops(2, 2), {0, 0.5}, s, 100, 5);
  ThreadCountGuard g(3);
  CHECK(build_batch(orig, AugmentedSource::crops(2, 2), {0, 0.5}, s, 100, 5) == crop_ref);
}
