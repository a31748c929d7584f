// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/types.hpp"

namespace t2i {

namespace {
constexpr std::array<std::string_view, 3> kSourceNames = {"original", "cutmix", "crop"};
constexpr std::array<std::string_view, 4> kKindNames = {"AIO", "TA", "CUTMIX_TA", "CROP_TA"};
constexpr std::array<std::string_view, 5> kPatternNames = {"half", "quarter", "ninth", "sixteenth", "all"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}
}  // namespace

std::string_view to_string(ImageSource s) { return kSourceNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(CaptionKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(CutMixPattern p) { return kPatternNames[static_cast<std::size_t>(p)]; }

std::optional<ImageSource> parse_image_source(std::string_view s) { return lookup<ImageSource>(kSourceNames, s); }
std::optional<CaptionKind> parse_caption_kind(std::string_view s) { return lookup<CaptionKind>(kKindNames, s); }
std::optional<CutMixPattern> parse_cutmix_pattern(std::string_view s) {
  return lookup<CutMixPattern>(kPatternNames, s);
}

}  // namespace t2i
