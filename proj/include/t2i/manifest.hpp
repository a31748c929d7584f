// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "t2i/types.hpp"

namespace t2i {

inline constexpr std::string_view kManifestSchema = "t2i-forge/1";

struct AugmentationProvenance {
  std::string base_id;
  std::optional<std::string> donor_id;
  std::optional<CutMixPattern> pattern;
  std::optional<Placement> placement;
  std::uint64_t seed = 0;

  friend bool operator==(const AugmentationProvenance&, const AugmentationProvenance&) = default;
};

struct ImageRecord {
  std::string id;
  std::string path;  // relative to the images root
  int width = 0;
  int height = 0;
  std::optional<std::string> class_label;
  ImageSource source = ImageSource::Original;
  std::optional<AugmentationProvenance> provenance;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct CaptionRecord {
  std::string image_id;
  std::string text;
  CaptionKind kind = CaptionKind::AIO;
  std::string generator;

  friend bool operator==(const CaptionRecord&, const CaptionRecord&) = default;
};

struct DatasetManifest {
  std::vector<ImageRecord> records;
  std::vector<CaptionRecord> captions;
  std::uint64_t seed = 0;
  std::string created_by;

  const ImageRecord* find(std::string_view id) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct Violation {
  std::string record_id;
  std::string rule;
  std::string message;
};

/// Every broken invariant, one entry per violation. Empty means valid.
std::vector<Violation> validate_manifest(const DatasetManifest& manifest);

/// Records sorted by id; captions by (image_id, kind, text).
void canonicalize(DatasetManifest& manifest);

/// Writes the canonical JSONL form; returns the number of bytes written.
std::size_t write_manifest(const DatasetManifest& manifest, std::ostream& out);
std::size_t write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
std::string manifest_to_string(const DatasetManifest& manifest);

DatasetManifest read_manifest(std::istream& in);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Number of cutmix-source records per pattern.
std::map<CutMixPattern, std::size_t> pattern_counts(const DatasetManifest& manifest);

/// Tool version string stamped into new manifests.
std::string tool_version();

}  // namespace t2i
