// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "t2i/cropaug.hpp"
#include "t2i/image.hpp"
#include "t2i/schedule.hpp"

namespace t2i {

/// Number of sinusoidal time frequencies (sin and cos each).
inline constexpr int kTimeFrequencies = 8;

/*!
 * Hashed bag-of-tokens text embedding.
 *
 * Lowercases, splits on anything that is not a letter or digit, hashes each
 * token (FNV-1a) to a bucket and a +/-1 sign, accumulates and L2-normalizes.
 * A caption without tokens maps to the all-zero null embedding that is used
 * for unconditional training and guidance.
 */
std::vector<double> embed_text(std::string_view caption, int dim);

/// Sinusoidal embedding of t/T, 2 * kTimeFrequencies values.
std::vector<double> time_embedding(int t, int horizon);

struct DenoiserShape {
  int width = 8;
  int height = 8;
  int channels = 1;
  int text_dim = 64;
  int hidden = 256;
  int horizon = 1000;

  int pixels() const noexcept { return width * height * channels; }
  int input_dim() const noexcept { return pixels() + 2 * kTimeFrequencies + text_dim; }
  std::size_t param_count() const noexcept;

  friend bool operator==(const DenoiserShape&, const DenoiserShape&) = default;
};

/*!
 * Two-layer MLP noise predictor:
 *   in  = [x_t, time embedding, text embedding]
 *   h   = tanh(W1 in + b1)
 *   out = W2 h + b2
 * Parameters are one flat vector in the order W1 (row-major, hidden x in),
 * b1, W2 (row-major, pixels x hidden), b2.
 */
class Denoiser {
 public:
  Denoiser() = default;
  Denoiser(DenoiserShape shape, std::vector<double> params);

  /// Gaussian init: W1 ~ N(0, 1/in), W2 ~ N(0, 0.01/hidden), biases zero.
  static Denoiser initialize(const DenoiserShape& shape, std::uint64_t seed);

  const DenoiserShape& shape() const noexcept { return shape_; }
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }

  /// Predicted noise for x_t. @p text must have shape().text_dim entries.
  std::vector<double> predict(std::span<const float> x_t, int t, std::span<const double> text) const;

  friend bool operator==(const Denoiser&, const Denoiser&) = default;

 private:
  DenoiserShape shape_;
  std::vector<double> params_;
};

/// Parameter index offsets for the flat layout.
struct ParamLayout {
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;
  explicit ParamLayout(const DenoiserShape& s);
};

/*!
 * Mean squared error over the pixels whose patch bit is set (all pixels when
 * no mask). The mask grid must divide the image evenly. Throws
 * ArgumentError on shape mismatch, an uneven grid or an empty mask.
 */
double masked_loss(std::span<const float> eps, std::span<const double> eps_hat, const std::optional<TokenMask>& mask,
                   int width, int height, int channels);

/// Per-pixel weights: 1/N for pixels inside the mask, 0 outside.
std::vector<double> loss_weights(const std::optional<TokenMask>& mask, int width, int height, int channels);

struct GradResult {
  double loss = 0.0;              // batch-mean masked loss
  std::vector<double> gradient;   // d loss / d params
};

/// Batch-mean masked loss without gradients.
double batch_loss(const Denoiser& denoiser, std::span<const TrainSample> batch);

/// Exact gradient of the batch-mean masked loss (OpenMP over samples, fixed-order reduction).
GradResult grad(const Denoiser& denoiser, std::span<const TrainSample> batch);

/// Sequential reference for grad().
GradResult grad_serial(const Denoiser& denoiser, std::span<const TrainSample> batch);

struct TrainConfig {
  std::size_t batch = 32;
  std::size_t steps = 1000;
  double learning_rate = 1e-3;
  GateParams gate{400, 0.5};
  double crop_prob = 0.5;
  double uncond_drop = 0.1;
  std::uint64_t seed = 0;
  NoiseSchedule schedule{};
  int hidden = 256;
  int text_dim = 64;
};

/// Throws ArgumentError on out-of-range fields.
void validate(const TrainConfig& config);

struct LossReport {
  std::size_t step = 0;
  double loss = 0.0;
  std::size_t n_aug = 0;
  std::size_t n_uncond = 0;
};

struct TrainResult {
  Denoiser denoiser;
  std::vector<LossReport> reports;
};

/// Per-step, per-slot unconditional drop decision.
bool drop_condition(std::uint64_t step_seed, std::size_t slot, double uncond_drop);

/// Seed for step @p step of a run seeded with @p seed.
std::uint64_t step_seed(std::uint64_t seed, std::size_t step);

/*!
 * Plain SGD on the gated diffusion loss. Each step builds a batch, replaces
 * captions by the null condition with probability uncond_drop, takes the
 * exact gradient and updates. The crop branch is not timestep-gated: with
 * a Crop source the gate becomes {tau = 0, aug_prob = crop_prob}.
 * Throws TrainingError naming the step when the loss goes non-finite.
 */
TrainResult train(const TrainConfig& config, const Dataset& original, const AugmentedSource& augmented);

/// Continue training an existing model.
TrainResult train(const TrainConfig& config, Denoiser init, const Dataset& original,
                  const AugmentedSource& augmented);

struct SampleResult {
  Image image;
  std::size_t cond_evals = 0;
  std::size_t uncond_evals = 0;
};

/*!
 * Ancestral sampling from t = T to 1 with classifier-free guidance
 * eps = (1 + w) eps(x, c, t) - w eps(x, null, t). The predicted x0 is
 * clipped to [-1, 1] each step; the output is clamped to [-1, 1].
 */
SampleResult sample(const Denoiser& denoiser, std::string_view caption, const NoiseSchedule& schedule,
                    double guidance_scale, std::uint64_t seed);

}  // namespace t2i
