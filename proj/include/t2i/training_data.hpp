// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "t2i/cutmix.hpp"
#include "t2i/manifest.hpp"
#include "t2i/schedule.hpp"

namespace t2i {

/// One example per (record, caption) for records whose source is in
/// @p sources, in canonical manifest order. A labelled record without any
/// caption falls back to its AIO caption; an unlabelled one is skipped.
Dataset dataset_from_manifest(const DatasetManifest& manifest, const ImageLookup& images,
                              const std::vector<ImageSource>& sources);

/// Loads every record image from disk (PNG) keyed by id.
std::map<std::string, Image> load_images(const DatasetManifest& manifest, const std::filesystem::path& images_root);

}  // namespace t2i
