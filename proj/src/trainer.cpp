// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/trainer.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "t2i/errors.hpp"
#include "t2i/rng.hpp"

namespace t2i {

std::vector<double> embed_text(std::string_view caption, int dim) {
  if (dim < 8) throw ArgumentError("embedding dim must be >= 8");
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  std::size_t i = 0;
  while (i < caption.size()) {
    while (i < caption.size() && !std::isalnum(static_cast<unsigned char>(caption[i]))) ++i;
    std::uint64_t h = 0xcbf29ce484222325ull;
    bool any = false;
    while (i < caption.size() && std::isalnum(static_cast<unsigned char>(caption[i]))) {
      h ^= static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(caption[i])));
      h *= 0x100000001b3ull;
      any = true;
      ++i;
    }
    if (!any) continue;
    h = mix64(h);
    v[h % static_cast<std::uint64_t>(dim)] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

std::vector<double> time_embedding(int t, int horizon) {
  std::vector<double> e(2 * kTimeFrequencies);
  const double u = static_cast<double>(t) / horizon;
  for (int k = 0; k < kTimeFrequencies; ++k) {
    const double arg = u * (std::numbers::pi / 2.0) * static_cast<double>(1 << k);
    e[2 * k] = std::sin(arg);
    e[2 * k + 1] = std::cos(arg);
  }
  return e;
}

std::size_t DenoiserShape::param_count() const noexcept { return ParamLayout(*this).total; }

ParamLayout::ParamLayout(const DenoiserShape& s) {
  const auto H = static_cast<std::size_t>(s.hidden);
  const auto I = static_cast<std::size_t>(s.input_dim());
  const auto P = static_cast<std::size_t>(s.pixels());
  w1 = 0;
  b1 = w1 + H * I;
  w2 = b1 + H;
  b2 = w2 + P * H;
  total = b2 + P;
}

Denoiser::Denoiser(DenoiserShape shape, std::vector<double> params) : shape_(shape), params_(std::move(params)) {
  if (shape_.pixels() < 1 || shape_.hidden < 1 || shape_.text_dim < 8 || shape_.horizon < 1) {
    throw ArgumentError("invalid denoiser shape");
  }
  if (params_.size() != shape_.param_count()) throw ArgumentError("parameter count does not match the shape");
  for (double p : params_) {
    if (!std::isfinite(p)) throw NumericError("non-finite denoiser parameter");
  }
}

Denoiser Denoiser::initialize(const DenoiserShape& shape, std::uint64_t seed) {
  const ParamLayout L(shape);
  std::vector<double> theta(L.total, 0.0);
  Rng rng(derive_seed(seed, 0x1417));
  const double s1 = 1.0 / std::sqrt(static_cast<double>(shape.input_dim()));
  const double s2 = 0.1 / std::sqrt(static_cast<double>(shape.hidden));
  for (std::size_t j = L.w1; j < L.b1; ++j) theta[j] = s1 * rng.normal();
  for (std::size_t j = L.w2; j < L.b2; ++j) theta[j] = s2 * rng.normal();
  return Denoiser(shape, std::move(theta));
}

std::vector<double> Denoiser::predict(std::span<const float> x_t, int t, std::span<const double> text) const {
  const int P = shape_.pixels();
  const int H = shape_.hidden;
  const int I = shape_.input_dim();
  if (x_t.size() != static_cast<std::size_t>(P)) throw ArgumentError("x_t size does not match the denoiser");
  if (text.size() != static_cast<std::size_t>(shape_.text_dim)) throw ArgumentError("text embedding size mismatch");
  const ParamLayout L(shape_);

  std::vector<double> in(static_cast<std::size_t>(I));
  std::copy(x_t.begin(), x_t.end(), in.begin());
  const auto temb = time_embedding(t, shape_.horizon);
  std::copy(temb.begin(), temb.end(), in.begin() + P);
  std::copy(text.begin(), text.end(), in.begin() + P + static_cast<int>(temb.size()));

  std::vector<double> h(static_cast<std::size_t>(H));
  for (int k = 0; k < H; ++k) {
    const double* w = &params_[L.w1 + static_cast<std::size_t>(k) * I];
    double z = params_[L.b1 + k];
    for (int i = 0; i < I; ++i) z += w[i] * in[i];
    h[k] = std::tanh(z);
  }
  std::vector<double> out(static_cast<std::size_t>(P));
  for (int p = 0; p < P; ++p) {
    const double* w = &params_[L.w2 + static_cast<std::size_t>(p) * H];
    double o = params_[L.b2 + p];
    for (int k = 0; k < H; ++k) o += w[k] * h[k];
    out[p] = o;
  }
  return out;
}

std::vector<double> loss_weights(const std::optional<TokenMask>& mask, int width, int height, int channels) {
  const auto n = static_cast<std::size_t>(width) * height * channels;
  if (!mask) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (mask->grid_w < 1 || mask->grid_h < 1 || width % mask->grid_w != 0 || height % mask->grid_h != 0) {
    throw ArgumentError("mask grid " + std::to_string(mask->grid_w) + "x" + std::to_string(mask->grid_h) +
                        " does not divide the " + std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  const int bw = width / mask->grid_w;
  const int bh = height / mask->grid_h;
  std::vector<double> w(n, 0.0);
  std::size_t inside = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!mask->at(x / bw, y / bh)) continue;
      for (int c = 0; c < channels; ++c) w[(static_cast<std::size_t>(y) * width + x) * channels + c] = 1.0;
      inside += static_cast<std::size_t>(channels);
    }
  }
  if (inside == 0) throw ArgumentError("mask selects no pixels");
  for (double& v : w) v /= static_cast<double>(inside);
  return w;
}

double masked_loss(std::span<const float> eps, std::span<const double> eps_hat, const std::optional<TokenMask>& mask,
                   int width, int height, int channels) {
  const auto n = static_cast<std::size_t>(width) * height * channels;
  if (eps.size() != n || eps_hat.size() != n) throw ArgumentError("loss operand shapes do not match the image");
  const auto w = loss_weights(mask, width, height, channels);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    const double r = eps_hat[i] - eps[i];
    loss += w[i] * r * r;
  }
  return loss;
}

double batch_loss(const Denoiser& denoiser, std::span<const TrainSample> batch) {
  if (batch.empty()) throw ArgumentError("batch must be non-empty");
  const auto& s = denoiser.shape();
  double sum = 0.0;
  for (const auto& x : batch) {
    const auto pred = denoiser.predict(x.x_t, x.t, embed_text(x.caption, s.text_dim));
    sum += masked_loss(x.eps, pred, x.mask, s.width, s.height, s.channels);
  }
  return sum * (1.0 / static_cast<double>(batch.size()));
}

void validate(const TrainConfig& c) {
  if (c.batch < 1) throw ArgumentError("batch must be >= 1");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) throw ArgumentError("learning rate must be > 0");
  if (!(c.uncond_drop >= 0.0 && c.uncond_drop <= 1.0)) throw ArgumentError("uncond_drop must lie in [0, 1]");
  if (!(c.crop_prob >= 0.0 && c.crop_prob <= 1.0)) throw ArgumentError("crop_prob must lie in [0, 1]");
  if (c.hidden < 1) throw ArgumentError("hidden must be >= 1");
  if (c.text_dim < 8) throw ArgumentError("text_dim must be >= 8");
  validate(c.schedule, c.gate);
}

std::uint64_t step_seed(std::uint64_t seed, std::size_t step) { return derive_seed(seed, 0x5eed0000ull + step); }

bool drop_condition(std::uint64_t step_seed, std::size_t slot, double uncond_drop) {
  return Rng(derive_seed(derive_seed(step_seed, 1), slot)).uniform01() < uncond_drop;
}

TrainResult train(const TrainConfig& config, const Dataset& original, const AugmentedSource& augmented) {
  validate(config);
  const DenoiserShape shape{original.width,   original.height, original.channels,
                            config.text_dim,  config.hidden,   config.schedule.horizon};
  return train(config, Denoiser::initialize(shape, config.seed), original, augmented);
}

TrainResult train(const TrainConfig& config, Denoiser init, const Dataset& original,
                  const AugmentedSource& augmented) {
  validate(config);
  if (init.shape().pixels() != static_cast<int>(original.pixel_count())) {
    throw ConfigError("denoiser shape does not match the dataset images");
  }
  if (init.shape().horizon != config.schedule.horizon) throw ConfigError("denoiser horizon differs from schedule");
  const GateParams gate =
      augmented.kind == AugmentedSource::Kind::Crop ? GateParams{0, config.crop_prob} : config.gate;

  TrainResult result{std::move(init), {}};
  result.reports.reserve(config.steps);
  auto theta = result.denoiser.params();
  for (std::size_t step = 0; step < config.steps; ++step) {
    const std::uint64_t sseed = step_seed(config.seed, step);
    auto batch = build_batch(original, augmented, gate, config.schedule, config.batch, derive_seed(sseed, 0));

    LossReport report{step, 0.0, 0, 0};
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].source == SampleSource::Augmented) ++report.n_aug;
      if (drop_condition(sseed, i, config.uncond_drop)) {
        batch[i].caption.clear();
        ++report.n_uncond;
      }
    }

    GradResult g;
    try {
      g = grad(result.denoiser, batch);
    } catch (const NumericError& e) {
      throw TrainingError("diverged at step " + std::to_string(step) + ": " + e.what());
    }
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= config.learning_rate * g.gradient[j];
    report.loss = g.loss;
    result.reports.push_back(report);
  }
  return result;
}

SampleResult sample(const Denoiser& denoiser, std::string_view caption, const NoiseSchedule& schedule,
                    double guidance_scale, std::uint64_t seed) {
  if (!(guidance_scale >= 0.0) || !std::isfinite(guidance_scale)) throw ArgumentError("guidance_scale must be >= 0");
  const auto& shape = denoiser.shape();
  if (shape.horizon != schedule.horizon) throw ArgumentError("denoiser horizon differs from schedule");

  const auto cond = embed_text(caption, shape.text_dim);
  const std::vector<double> null_text(static_cast<std::size_t>(shape.text_dim), 0.0);
  const auto P = static_cast<std::size_t>(shape.pixels());

  SampleResult out;
  Rng rng(seed);
  std::vector<float> x(P);
  for (auto& v : x) v = static_cast<float>(rng.normal());

  for (int t = schedule.horizon; t >= 1; --t) {
    auto eps = denoiser.predict(x, t, cond);
    ++out.cond_evals;
    if (guidance_scale > 0.0) {
      const auto eps_u = denoiser.predict(x, t, null_text);
      ++out.uncond_evals;
      for (std::size_t i = 0; i < P; ++i) eps[i] = (1.0 + guidance_scale) * eps[i] - guidance_scale * eps_u[i];
    }
    const double ab = gamma(schedule, t);
    const double ab_prev = gamma(schedule, t - 1);
    const double beta = 1.0 - ab / ab_prev;
    const double c_x0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
    const double c_xt = std::sqrt(1.0 - beta) * (1.0 - ab_prev) / (1.0 - ab);
    const double sigma = t > 1 ? std::sqrt(beta * (1.0 - ab_prev) / (1.0 - ab)) : 0.0;
    for (std::size_t i = 0; i < P; ++i) {
      double x0 = (x[i] - std::sqrt(1.0 - ab) * eps[i]) / std::sqrt(ab);
      x0 = std::clamp(x0, -1.0, 1.0);
      double next = c_x0 * x0 + c_xt * x[i];
      if (t > 1) next += sigma * rng.normal();
      if (!std::isfinite(next)) throw SamplingError("non-finite value at t=" + std::to_string(t));
      x[i] = static_cast<float>(next);
    }
  }

  out.image = Image(shape.width, shape.height, shape.channels);
  for (std::size_t i = 0; i < P; ++i) out.image.data[i] = std::clamp(x[i], -1.0f, 1.0f);
  return out;
}

}  // namespace t2i
