// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Forward/backward for the MLP denoiser over a batch. Per-sample
// activations are computed independently; each parameter row then sums its
// per-sample terms in index order, so the serial and OpenMP paths produce
// bit-identical gradients.

#include <algorithm>
#include <cmath>

#include "t2i/errors.hpp"
#include "t2i/parallel.hpp"
#include "t2i/trainer.hpp"

namespace t2i {

namespace {

/// Per-sample quantities the parameter gradient is assembled from.
struct Backprop {
  std::vector<double> in;    // input vector
  std::vector<double> h;     // hidden activations
  std::vector<double> dout;  // scale * d loss / d output
  std::vector<double> dz;    // scale * d loss / d hidden pre-activation
  double loss = 0.0;
};

Backprop backprop(const Denoiser& den, const ParamLayout& L, const TrainSample& s, double scale) {
  const auto& shape = den.shape();
  const int P = shape.pixels();
  const int H = shape.hidden;
  const int I = shape.input_dim();
  if (s.x_t.size() != static_cast<std::size_t>(P) || s.eps.size() != static_cast<std::size_t>(P)) {
    throw ArgumentError("sample pixel count does not match the denoiser");
  }
  const auto theta = den.params();
  Backprop b;

  b.in.resize(static_cast<std::size_t>(I));
  std::copy(s.x_t.begin(), s.x_t.end(), b.in.begin());
  const auto temb = time_embedding(s.t, shape.horizon);
  std::copy(temb.begin(), temb.end(), b.in.begin() + P);
  const auto text = embed_text(s.caption, shape.text_dim);
  std::copy(text.begin(), text.end(), b.in.begin() + P + static_cast<int>(temb.size()));

  b.h.resize(static_cast<std::size_t>(H));
  for (int k = 0; k < H; ++k) {
    const double* w = &theta[L.w1 + static_cast<std::size_t>(k) * I];
    double z = theta[L.b1 + k];
    for (int i = 0; i < I; ++i) z += w[i] * b.in[i];
    b.h[k] = std::tanh(z);
  }

  const auto weights = loss_weights(s.mask, shape.width, shape.height, shape.channels);
  b.dout.resize(static_cast<std::size_t>(P));
  for (int p = 0; p < P; ++p) {
    const double* w = &theta[L.w2 + static_cast<std::size_t>(p) * H];
    double o = theta[L.b2 + p];
    for (int k = 0; k < H; ++k) o += w[k] * b.h[k];
    if (!std::isfinite(o)) throw NumericError("non-finite denoiser output");
    const double r = o - s.eps[p];
    b.loss += weights[p] * r * r;
    b.dout[p] = scale * 2.0 * weights[p] * r;
  }

  std::vector<double> dh(static_cast<std::size_t>(H), 0.0);
  for (int p = 0; p < P; ++p) {
    if (b.dout[p] == 0.0) continue;  // masked-out pixel: contributes nothing
    const double* w = &theta[L.w2 + static_cast<std::size_t>(p) * H];
    for (int k = 0; k < H; ++k) dh[k] += w[k] * b.dout[p];
  }
  b.dz.resize(static_cast<std::size_t>(H));
  for (int k = 0; k < H; ++k) b.dz[k] = dh[k] * (1.0 - b.h[k] * b.h[k]);
  return b;
}

// Output-layer row p (W2 row and b2 entry) summed over samples in order.
void output_row(const ParamLayout& L, int H, int p, std::span<const Backprop> bp, double* g) {
  double* gw = &g[L.w2 + static_cast<std::size_t>(p) * H];
  for (const auto& b : bp) {
    const double d = b.dout[p];
    if (d == 0.0) continue;
    for (int k = 0; k < H; ++k) gw[k] += d * b.h[k];
    g[L.b2 + p] += d;
  }
}

// Hidden-layer row k (W1 row and b1 entry) summed over samples in order.
void hidden_row(const ParamLayout& L, int I, int k, std::span<const Backprop> bp, double* g) {
  double* gw = &g[L.w1 + static_cast<std::size_t>(k) * I];
  for (const auto& b : bp) {
    const double dz = b.dz[k];
    for (int i = 0; i < I; ++i) gw[i] += dz * b.in[i];
    g[L.b1 + k] += dz;
  }
}

void check_batch(std::span<const TrainSample> batch) {
  if (batch.empty()) throw ArgumentError("batch must be non-empty");
}

GradResult finish(std::vector<double> gradient, std::span<const Backprop> bp, double scale) {
  double sum = 0.0;
  for (const auto& b : bp) sum += b.loss;
  GradResult out{sum * scale, std::move(gradient)};
  if (!std::isfinite(out.loss)) throw NumericError("non-finite loss");
  return out;
}

}  // namespace

GradResult grad_serial(const Denoiser& denoiser, std::span<const TrainSample> batch) {
  check_batch(batch);
  const auto& shape = denoiser.shape();
  const ParamLayout L(shape);
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<Backprop> bp;
  bp.reserve(batch.size());
  for (const auto& s : batch) bp.push_back(backprop(denoiser, L, s, scale));
  std::vector<double> g(L.total, 0.0);
  for (int p = 0; p < shape.pixels(); ++p) output_row(L, shape.hidden, p, bp, g.data());
  for (int k = 0; k < shape.hidden; ++k) hidden_row(L, shape.input_dim(), k, bp, g.data());
  return finish(std::move(g), bp, scale);
}

GradResult grad(const Denoiser& denoiser, std::span<const TrainSample> batch) {
  check_batch(batch);
  const auto& shape = denoiser.shape();
  const ParamLayout L(shape);
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<Backprop> bp(batch.size());
  parallel_for(static_cast<std::int64_t>(batch.size()), [&](std::int64_t i) {
    const auto s = static_cast<std::size_t>(i);
    bp[s] = backprop(denoiser, L, batch[s], scale);
  });
  std::vector<double> g(L.total, 0.0);
  const int P = shape.pixels(), H = shape.hidden;
  parallel_for(P + H, [&](std::int64_t r) {
    if (r < P) output_row(L, H, static_cast<int>(r), bp, g.data());
    else hidden_row(L, shape.input_dim(), static_cast<int>(r - P), bp, g.data());
  });
  return finish(std::move(g), bp, scale);
}

}  // namespace t2i
