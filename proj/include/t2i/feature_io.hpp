// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "t2i/metrics.hpp"

namespace t2i {

/// "FEAT", u8 version 1, u32 n, u32 d, then n*d float32; all little-endian.
inline constexpr std::uint8_t kFeatureFileVersion = 1;

std::vector<std::uint8_t> encode_features(const FeatureSet& features);
FeatureSet decode_features(std::span<const std::uint8_t> bytes);

void write_features(const std::filesystem::path& path, const FeatureSet& features);
FeatureSet read_features(const std::filesystem::path& path);

}  // namespace t2i
