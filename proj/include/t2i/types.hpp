// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Vocabulary shared by the manifest, captioner and cutmix modules.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace t2i {

enum class ImageSource { Original, CutMix, Crop };

enum class CaptionKind { AIO, TA, CutMixTA, CropTA };

/// Structured CutMix settings. All is a curation-level mixture only.
enum class CutMixPattern { Half, Quarter, Ninth, Sixteenth, All };

/// The four single patterns in round-robin order for the All mixture.
inline constexpr std::array<CutMixPattern, 4> kSinglePatterns = {
    CutMixPattern::Half, CutMixPattern::Quarter, CutMixPattern::Ninth, CutMixPattern::Sixteenth};

/// Donor rectangle on the base image, in pixels.
struct Placement {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

std::string_view to_string(ImageSource s);
std::string_view to_string(CaptionKind k);
/// Wire names: "half", "quarter", "ninth", "sixteenth", "all".
std::string_view to_string(CutMixPattern p);

std::optional<ImageSource> parse_image_source(std::string_view s);
std::optional<CaptionKind> parse_caption_kind(std::string_view s);
std::optional<CutMixPattern> parse_cutmix_pattern(std::string_view s);

}  // namespace t2i
