// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "t2i/config.hpp"

namespace t2i::cli {

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> set;  // extra key=value overrides
};

struct ToyDatasetArgs {
  std::filesystem::path out;
  std::size_t n_per_class = 50;
};

struct CurateArgs {
  std::optional<std::string> manifest, images_root;
  std::string setting = "all";
  std::size_t count = 400;
  std::optional<std::filesystem::path> out;
  std::string captioner = "stub";
};

struct CaptionArgs {
  std::optional<std::string> manifest, images_root;
  std::optional<std::filesystem::path> out;
  std::string captioner = "stub";
};

struct TrainArgs {
  std::optional<std::string> manifest, images_root;
  std::filesystem::path out = "model.ckpt";
  std::optional<std::filesystem::path> loss_csv;
  std::optional<std::string> augment;
  std::optional<std::string> steps, batch, learning_rate, tau, aug_prob, crop_prob, uncond_drop, hidden;
};

struct SampleArgs {
  std::filesystem::path checkpoint;
  std::string caption;
  std::size_t count = 1;
  std::optional<std::string> guidance;
  std::filesystem::path out = "samples";
};

struct EvalArgs {
  std::filesystem::path real, fake;
  std::optional<std::filesystem::path> image_feats, text_feats, out;
  std::optional<std::string> k;
};

struct AblateArgs {
  std::string axis;
  std::optional<std::string> grid;
  std::optional<std::string> steps, batch;
  std::size_t toy_per_class = 32;
  std::size_t cutmix_count = 64;
  std::filesystem::path out = "ablation.csv";
};

/// Config file (if any) plus --seed/--threads/--set overrides.
RunConfig resolve_config(const GlobalOptions& global);

int cmd_toy_dataset(const GlobalOptions& g, const ToyDatasetArgs& a);
int cmd_curate(const GlobalOptions& g, const CurateArgs& a);
int cmd_caption(const GlobalOptions& g, const CaptionArgs& a);
int cmd_train(const GlobalOptions& g, const TrainArgs& a);
int cmd_sample(const GlobalOptions& g, const SampleArgs& a);
int cmd_eval(const GlobalOptions& g, const EvalArgs& a);
int cmd_ablate(const GlobalOptions& g, const AblateArgs& a);

}  // namespace t2i::cli
