// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "t2i/image.hpp"
#include "t2i/manifest.hpp"
#include "t2i/types.hpp"

namespace t2i {

/// Smallest base side accepted by plan_placement.
inline constexpr int kMinCutMixSide = 8;

/// Fraction of the base area guarded by the Sixteenth pattern.
inline constexpr double kCentralAreaFraction = 0.10;

struct CutMixPlan {
  std::string base_id;
  std::string donor_id;
  CutMixPattern pattern = CutMixPattern::Half;
  Placement placement;
  std::uint64_t seed = 0;
};

/// Nominal area fraction of a single pattern: 1/2, 1/4, 1/9, 1/16.
double nominal_coverage(CutMixPattern pattern);

/// Side of the guarded central square: ceil(sqrt(0.1 * w * h)).
int central_square_side(int base_w, int base_h);

/// True when the rectangle does not intersect the central square.
bool disjoint_from_center(const Placement& p, int base_w, int base_h);

/*!
 * Donor geometry for one pattern, deterministic in (pattern, dims, seed).
 *
 * - Half: one half of the base, split orientation and side from the seed.
 * - Quarter: floor(w/2) x floor(h/2) at one of the four corners.
 * - Ninth: floor(w/3) x floor(h/3) centred on one edge midpoint, flush to it.
 * - Sixteenth: floor(w/4) x floor(h/4) anywhere not touching the central
 *   10%-area square.
 *
 * Throws ArgumentError for All and GeometryError for bases under 8 px.
 */
Placement plan_placement(CutMixPattern pattern, int base_w, int base_h, std::uint64_t seed);

/// (w*h) / (base_w*base_h).
double coverage(const Placement& placement, int base_w, int base_h);

/// Donor bilinearly resized to the placement and pasted opaquely into base.
Image composite(const Image& base, const Image& donor, const Placement& placement);

/// Half keeps both images at full resolution: the donor contributes the
/// region of itself that lands under the placement (after matching base
/// dims). Other patterns shrink the whole donor into the placement.
Image apply_plan(const Image& base, const Image& donor, const CutMixPlan& plan);

/// Selects base/donor pairs and geometry for `count` outputs. Donors always
/// come from a different class. All assigns patterns round-robin.
std::vector<CutMixPlan> plan_cutmix(const DatasetManifest& manifest, CutMixPattern setting, std::size_t count,
                                    std::uint64_t seed);

/// Id of the i-th curated record for a setting, e.g. "cm-quarter-000012".
std::string cutmix_record_id(CutMixPattern setting, std::size_t index);

/// Manifest rows for plans; records are appended to a copy of @p manifest.
DatasetManifest cutmix_manifest(const DatasetManifest& manifest, const std::vector<CutMixPlan>& plans,
                                CutMixPattern setting);

using ImageLookup = std::function<const Image&(const std::string& id)>;

/// Renders every plan (OpenMP over plans). Output order follows @p plans.
std::vector<Image> render_cutmix(const std::vector<CutMixPlan>& plans, const ImageLookup& images);

/*!
 * Full curation: plans, composites written as PNG under
 * images_root/cutmix/<id>.png, and the extended manifest.
 */
DatasetManifest curate_cutmix(const DatasetManifest& manifest, const std::filesystem::path& images_root,
                              CutMixPattern setting, std::size_t count, std::uint64_t seed);

}  // namespace t2i
