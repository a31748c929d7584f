// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/training_data.hpp"

#include <algorithm>

#include "t2i/captioner.hpp"
#include "t2i/errors.hpp"

namespace t2i {

Dataset dataset_from_manifest(const DatasetManifest& manifest, const ImageLookup& images,
                              const std::vector<ImageSource>& sources) {
  DatasetManifest m = manifest;
  canonicalize(m);
  std::map<std::string, std::vector<const CaptionRecord*>> captions;
  for (const auto& c : m.captions) captions[c.image_id].push_back(&c);

  Dataset ds;
  bool first = true;
  for (const auto& r : m.records) {
    if (std::find(sources.begin(), sources.end(), r.source) == sources.end()) continue;
    std::vector<std::string> texts;
    if (auto it = captions.find(r.id); it != captions.end()) {
      for (const auto* c : it->second) texts.push_back(c->text);
    } else if (r.class_label) {
      texts.push_back(aio_caption(*r.class_label));
    } else {
      continue;
    }
    const Image& img = images(r.id);
    if (first) {
      ds.width = img.width;
      ds.height = img.height;
      ds.channels = img.channels;
      first = false;
    } else if (img.width != ds.width || img.height != ds.height || img.channels != ds.channels) {
      throw ConfigError("image '" + r.id + "' differs in shape from the rest of the dataset");
    }
    for (auto& t : texts) ds.items.push_back({img.data, std::move(t)});
  }
  return ds;
}

std::map<std::string, Image> load_images(const DatasetManifest& manifest, const std::filesystem::path& images_root) {
  std::map<std::string, Image> out;
  for (const auto& r : manifest.records) out.emplace(r.id, read_png(images_root / r.path));
  return out;
}

}  // namespace t2i
