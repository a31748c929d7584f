// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "t2i/trainer.hpp"
#include "t2i/types.hpp"

namespace t2i {

enum class AblationAxis { Tau, AugProb, Pattern };

std::optional<AblationAxis> parse_ablation_axis(std::string_view s);
std::string_view to_string(AblationAxis axis);

/// Default grids: the tau, probability and CutMix-setting sweeps.
std::vector<std::string> default_grid(AblationAxis axis);

struct AblationBase {
  TrainConfig train{};                 // gate, steps, batch, seed, ...
  std::size_t toy_per_class = 32;      // training images per class
  std::size_t holdout_per_class = 16;  // held-out images per class
  std::size_t cutmix_count = 64;       // curated images per grid point
  std::size_t holdout_batch = 256;
  CutMixPattern tau_setting = CutMixPattern::All;          // setting used for the tau sweep
  CutMixPattern aug_prob_setting = CutMixPattern::Quarter;  // setting used for the probability sweep
};

struct AblationRow {
  std::string axis;
  std::string value;
  bool ok = false;
  std::string error;
  double final_loss = 0.0;    // mean loss over the last 10% of steps
  double holdout_loss = 0.0;  // plain (ungated) loss on held-out images
  std::size_t slots = 0;
  std::size_t n_aug = 0;
  double expected_aug_fraction = 0.0;  // aug_prob * (1 - tau / T)
  std::map<CutMixPattern, std::size_t> pattern_counts;

  double aug_fraction() const { return slots == 0 ? 0.0 : static_cast<double>(n_aug) / static_cast<double>(slots); }
};

struct AblationReport {
  std::vector<AblationRow> rows;
  bool all_ok() const;
};

/// Trains one toy model per grid value. A failing point is recorded in its
/// row and does not stop the sweep. Point i uses seed derive_seed(seed, i).
AblationReport run_ablation(AblationAxis axis, const std::vector<std::string>& grid, const AblationBase& base);

/// Header: axis,value,status,final_loss,holdout_loss,slots,n_aug,aug_fraction,
/// expected_aug_fraction,n_half,n_quarter,n_ninth,n_sixteenth,error
void write_ablation_csv(const AblationReport& report, std::ostream& out);

}  // namespace t2i
