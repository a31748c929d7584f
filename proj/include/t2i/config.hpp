// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "t2i/trainer.hpp"

namespace t2i {

enum class AugmentKind { None, CutMix, Crop };

std::optional<AugmentKind> parse_augment_kind(std::string_view s);

/*!
 * Flat run configuration. The file format is `key = value` per line with
 * `#` comments; unknown keys are rejected and path-valued keys must exist
 * when the file is loaded.
 */
struct RunConfig {
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> images_root;
  std::optional<std::filesystem::path> out_dir;

  TrainConfig train{};
  AugmentKind augment = AugmentKind::None;
  int grid_w = 4;
  int grid_h = 4;

  std::size_t k = 5;
  double guidance = 2.0;

  std::string caption_url;
  double caption_timeout = 30.0;
  int caption_retries = 3;
  int caption_parallelism = 4;

  int threads = 0;  // 0 = OpenMP default
};

/// Keys accepted by load_run_config, in documentation order.
const std::map<std::string, std::string>& run_config_keys();

/// Applies `key = value` text on top of @p base. Throws ConfigError with the
/// offending line number on unknown keys, bad values or missing paths.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies one key/value pair (shared by the file parser and CLI overrides).
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

}  // namespace t2i
