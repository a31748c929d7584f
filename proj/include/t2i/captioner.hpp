// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "t2i/manifest.hpp"
#include "t2i/types.hpp"

namespace t2i {

inline constexpr std::string_view kPlainPrompt = "Describe this image";
inline constexpr std::string_view kCutMixPrompt =
    "Describe this image. Consider all the objects in the picture. Describe them, describe their position "
    "and their relation. Do not consider the image as a composite of images. The image is a single scene image";

/// "An image of <class>". Throws ArgumentError on an empty name.
std::string aio_caption(std::string_view class_name);

enum class PromptTarget { Plain, CutMix };

struct CaptionPrompt {
  std::string text;
  PromptTarget target = PromptTarget::Plain;
};

/// Cutmix images get the single-scene prompt; originals and crops the plain one.
CaptionPrompt prompt_for(ImageSource source);

/// Fixed stub vocabularies (16 entries each).
std::span<const std::string_view> stub_colors();
std::span<const std::string_view> stub_relations();

/// id -> class label, used to resolve cutmix base/donor labels.
using LabelIndex = std::unordered_map<std::string, std::string>;
LabelIndex label_index(const DatasetManifest& manifest);

/*!
 * Deterministic offline stand-in for a VLM caption.
 *
 * Word choices depend only on (record.id, seed). Cutmix records name both
 * the base and the donor class, resolved through @p labels from the
 * provenance ids. Throws ArgumentError when no label can be found.
 */
std::string stub_caption(const ImageRecord& record, std::uint64_t seed, const LabelIndex& labels = {});

struct CaptionerEndpoint {
  std::string base_url;
  double timeout_s = 30.0;
  int max_retries = 3;
  /// First retry delay; doubles on each further retry.
  double backoff_s = 0.25;
};

/// POST {base_url}/caption with {"image_b64","prompt"}; returns "caption".
/// Retries transport failures and 5xx replies up to max_retries times.
std::string remote_caption(const CaptionerEndpoint& endpoint, std::span<const std::uint8_t> image,
                           const CaptionPrompt& prompt);

struct CaptionJob {
  std::string image_id;
  std::vector<std::uint8_t> image;
  CaptionPrompt prompt;
};

/// Runs jobs over at most @p parallelism concurrent requests. Results are
/// keyed by image id, so completion order does not matter. The first failure
/// is rethrown after all workers stop.
std::map<std::string, std::string> remote_caption_all(const CaptionerEndpoint& endpoint,
                                                      const std::vector<CaptionJob>& jobs, int parallelism);

/// Caption kind a generated caption gets for each image source.
CaptionKind generated_kind(ImageSource source);

struct CaptionOptions {
  bool remote = false;
  CaptionerEndpoint endpoint{};
  int parallelism = 4;
  std::uint64_t seed = 0;
  std::filesystem::path images_root;  // needed for remote captioning
};

/*!
 * Adds a generated caption to every record that lacks one of its
 * generated_kind(). Crop records reuse their base image's TA caption
 * instead of being re-captioned.
 */
DatasetManifest caption_missing(const DatasetManifest& manifest, const CaptionOptions& options);

}  // namespace t2i
