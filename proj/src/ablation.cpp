// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/ablation.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>

#include "t2i/captioner.hpp"
#include "t2i/cutmix.hpp"
#include "t2i/errors.hpp"
#include "t2i/rng.hpp"
#include "t2i/toy_dataset.hpp"
#include "t2i/training_data.hpp"

namespace t2i {

std::optional<AblationAxis> parse_ablation_axis(std::string_view s) {
  if (s == "tau") return AblationAxis::Tau;
  if (s == "aug_prob") return AblationAxis::AugProb;
  if (s == "pattern") return AblationAxis::Pattern;
  return std::nullopt;
}

std::string_view to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::Tau: return "tau";
    case AblationAxis::AugProb: return "aug_prob";
    case AblationAxis::Pattern: return "pattern";
  }
  return "?";
}

std::vector<std::string> default_grid(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::Tau: return {"300", "400", "500", "600"};
    case AblationAxis::AugProb: return {"0", "0.25", "0.5", "0.75", "1"};
    case AblationAxis::Pattern: return {"half", "quarter", "ninth", "sixteenth", "all"};
  }
  return {};
}

bool AblationReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const AblationRow& r) { return r.ok; });
}

namespace {

template <typename T>
T parse_grid_value(const std::string& v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ArgumentError("bad grid value '" + v + "'");
  return out;
}

struct CuratedBranch {
  DatasetManifest manifest;
  std::map<std::string, Image> images;
  Dataset dataset;
};

CuratedBranch curate_in_memory(const ToyDataset& toy, CutMixPattern setting, std::size_t count, std::uint64_t seed) {
  CuratedBranch out;
  const auto plans = plan_cutmix(toy.manifest, setting, count, seed);
  const ImageLookup toy_lookup = [&toy](const std::string& id) -> const Image& { return toy.images.at(id); };
  auto rendered = render_cutmix(plans, toy_lookup);
  out.manifest = cutmix_manifest(toy.manifest, plans, setting);
  const auto labels = label_index(toy.manifest);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const std::string id = cutmix_record_id(setting, i);
    const ImageRecord* r = out.manifest.find(id);
    out.manifest.captions.push_back({id, stub_caption(*r, seed, labels), CaptionKind::CutMixTA, "stub"});
    out.images.emplace(id, std::move(rendered[i]));
  }
  out.dataset = dataset_from_manifest(
      out.manifest, [&out](const std::string& id) -> const Image& { return out.images.at(id); },
      {ImageSource::CutMix});
  return out;
}

}  // namespace

AblationReport run_ablation(AblationAxis axis, const std::vector<std::string>& grid, const AblationBase& base) {
  if (grid.empty()) throw ArgumentError("ablation grid is empty");
  const std::uint64_t seed = base.train.seed;
  const ToyDataset toy = make_toy_dataset(base.toy_per_class, derive_seed(seed, 0xa0));
  const ToyDataset held = make_toy_dataset(base.holdout_per_class, derive_seed(seed, 0xa1));
  auto lookup_in = [](const ToyDataset& t) {
    return ImageLookup([&t](const std::string& id) -> const Image& { return t.images.at(id); });
  };
  const Dataset original = dataset_from_manifest(toy.manifest, lookup_in(toy), {ImageSource::Original});
  const Dataset holdout = dataset_from_manifest(held.manifest, lookup_in(held), {ImageSource::Original});

  AblationReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    AblationRow row;
    row.axis = std::string(to_string(axis));
    row.value = grid[i];
    try {
      TrainConfig cfg = base.train;
      cfg.seed = derive_seed(seed, i);
      CutMixPattern setting = base.tau_setting;
      switch (axis) {
        case AblationAxis::Tau:
          cfg.gate.tau = parse_grid_value<int>(grid[i]);
          break;
        case AblationAxis::AugProb:
          cfg.gate.aug_prob = parse_grid_value<double>(grid[i]);
          setting = base.aug_prob_setting;
          break;
        case AblationAxis::Pattern: {
          const auto p = parse_cutmix_pattern(grid[i]);
          if (!p) throw ArgumentError("unknown CutMix setting '" + grid[i] + "'");
          setting = *p;
          break;
        }
      }
      validate(cfg);
      const CuratedBranch branch = curate_in_memory(toy, setting, base.cutmix_count, derive_seed(cfg.seed, 1));
      row.pattern_counts = pattern_counts(branch.manifest);

      const TrainResult result = train(cfg, original, AugmentedSource::from(branch.dataset));
      const std::size_t tail = std::max<std::size_t>(1, result.reports.size() / 10);
      double sum = 0.0;
      for (std::size_t s = result.reports.size() - tail; s < result.reports.size(); ++s) {
        sum += result.reports[s].loss;
      }
      row.final_loss = result.reports.empty() ? 0.0 : sum / static_cast<double>(tail);
      for (const auto& r : result.reports) row.n_aug += r.n_aug;
      row.slots = cfg.steps * cfg.batch;
      row.expected_aug_fraction =
          cfg.gate.aug_prob * (1.0 - static_cast<double>(cfg.gate.tau) / cfg.schedule.horizon);

      const auto hold_batch = build_batch(holdout, AugmentedSource::none(), GateParams{cfg.schedule.horizon, 0.0},
                                          cfg.schedule, base.holdout_batch, derive_seed(seed, 0xa2));
      row.holdout_loss = batch_loss(result.denoiser, hold_batch);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_ablation_csv(const AblationReport& report, std::ostream& out) {
  out << "axis,value,status,final_loss,holdout_loss,slots,n_aug,aug_fraction,expected_aug_fraction,"
         "n_half,n_quarter,n_ninth,n_sixteenth,error\n";
  auto count = [](const AblationRow& r, CutMixPattern p) {
    auto it = r.pattern_counts.find(p);
    return it == r.pattern_counts.end() ? std::size_t{0} : it->second;
  };
  for (const auto& r : report.rows) {
    char nums[256];
    std::snprintf(nums, sizeof nums, "%.6f,%.6f,%zu,%zu,%.6f,%.6f", r.final_loss, r.holdout_loss, r.slots, r.n_aug,
                  r.aug_fraction(), r.expected_aug_fraction);
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.axis << ',' << r.value << ',' << (r.ok ? "ok" : "failed") << ',' << nums << ','
        << count(r, CutMixPattern::Half) << ',' << count(r, CutMixPattern::Quarter) << ','
        << count(r, CutMixPattern::Ninth) << ',' << count(r, CutMixPattern::Sixteenth) << ',' << err << '\n';
  }
}

}  // namespace t2i
