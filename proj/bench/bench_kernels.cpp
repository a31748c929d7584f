// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernel timings. Pairs share the argument so the
// report reads as serial/parallel rows for the same size.

#include <benchmark/benchmark.h>

#include "t2i/metrics.hpp"
#include "t2i/rng.hpp"
#include "t2i/schedule.hpp"
#include "t2i/trainer.hpp"

namespace {

t2i::FeatureSet features(std::size_t n, std::size_t d, std::uint64_t seed) {
  t2i::Rng rng(seed);
  t2i::FeatureSet f(n, d);
  for (auto& v : f.data) v = rng.normal();
  return f;
}

t2i::Dataset toy_dataset(int side, std::size_t n) {
  t2i::Dataset d;
  d.width = d.height = side;
  t2i::Rng rng(7);
  for (std::size_t i = 0; i < n; ++i) {
    t2i::Example e;
    e.caption = i % 2 ? "An image of disk" : "An image of stripe";
    for (std::size_t p = 0; p < d.pixel_count(); ++p) e.pixels.push_back(static_cast<float>(rng.uniform01() * 2 - 1));
    d.items.push_back(std::move(e));
  }
  return d;
}

template <auto Kernel>
void BM_knn_radii(benchmark::State& state) {
  const auto f = features(static_cast<std::size_t>(state.range(0)), 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f, 5));
}
BENCHMARK(BM_knn_radii<t2i::kernels::knn_radii_serial>)->Name("knn_radii/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_knn_radii<t2i::kernels::knn_radii>)->Name("knn_radii/omp")->Arg(512)->Arg(2048);

template <auto Kernel>
void BM_ball_counts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto real = features(n, 64, 2), fake = features(n, 64, 3);
  const auto radii = t2i::kernels::knn_radii(real, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(fake, real, radii));
}
BENCHMARK(BM_ball_counts<t2i::kernels::ball_counts_serial>)->Name("ball_counts/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_ball_counts<t2i::kernels::ball_counts>)->Name("ball_counts/omp")->Arg(512)->Arg(2048);

template <auto Kernel>
void BM_centered_gram(benchmark::State& state) {
  const auto f = features(4096, static_cast<std::size_t>(state.range(0)), 4);
  std::vector<double> mean(f.d, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f, mean));
}
BENCHMARK(BM_centered_gram<t2i::kernels::centered_gram_serial>)->Name("centered_gram/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_centered_gram<t2i::kernels::centered_gram>)->Name("centered_gram/omp")->Arg(64)->Arg(256);

template <auto Kernel>
void BM_grad(benchmark::State& state) {
  const auto data = toy_dataset(8, 64);
  const auto batch = t2i::build_batch(data, t2i::AugmentedSource::none(), {400, 0.0}, {},
                                      static_cast<std::size_t>(state.range(0)), 9);
  t2i::DenoiserShape shape;
  shape.width = shape.height = 8;
  shape.hidden = 256;
  shape.text_dim = 64;
  const auto net = t2i::Denoiser::initialize(shape, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(net, batch));
}
BENCHMARK(BM_grad<t2i::grad_serial>)->Name("grad/serial")->Arg(32)->Arg(128);
BENCHMARK(BM_grad<t2i::grad>)->Name("grad/omp")->Arg(32)->Arg(128);

template <auto Kernel>
void BM_build_batch(benchmark::State& state) {
  const auto data = toy_dataset(32, 256);
  const auto aug = toy_dataset(32, 256);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(data, t2i::AugmentedSource::from(aug), {400, 0.5}, {}, m, 11));
}
BENCHMARK(BM_build_batch<t2i::build_batch_serial>)->Name("build_batch/serial")->Arg(64)->Arg(512);
BENCHMARK(BM_build_batch<t2i::build_batch>)->Name("build_batch/omp")->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
