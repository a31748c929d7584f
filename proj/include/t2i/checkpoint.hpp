// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "t2i/trainer.hpp"

namespace t2i {

/// 14 bytes including the trailing NUL.
inline constexpr char kCheckpointMagic[] = "T2IFORGE-CKPT";
inline constexpr std::size_t kCheckpointMagicSize = sizeof(kCheckpointMagic);

/*!
 * Layout: magic, one JSON line (shape plus an echo of the training config),
 * then the parameters as little-endian float32 in declaration order.
 */
std::vector<std::uint8_t> encode_checkpoint(const Denoiser& denoiser, const TrainConfig& config);
void write_checkpoint(const std::filesystem::path& path, const Denoiser& denoiser, const TrainConfig& config);

struct LoadedCheckpoint {
  Denoiser denoiser;
  std::string config_json;
};

LoadedCheckpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
LoadedCheckpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace t2i
