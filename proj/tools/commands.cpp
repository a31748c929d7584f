// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "t2i/ablation.hpp"
#include "t2i/captioner.hpp"
#include "t2i/checkpoint.hpp"
#include "t2i/cutmix.hpp"
#include "t2i/errors.hpp"
#include "t2i/feature_io.hpp"
#include "t2i/manifest.hpp"
#include "t2i/metrics.hpp"
#include "t2i/parallel.hpp"
#include "t2i/rng.hpp"
#include "t2i/toy_dataset.hpp"
#include "t2i/training_data.hpp"

namespace fs = std::filesystem;

namespace t2i::cli {
namespace {

void apply_opt(RunConfig& cfg, std::string_view key, const std::optional<std::string>& value) {
  if (value) set_config_value(cfg, key, *value);
}

fs::path need_path(const std::optional<fs::path>& p, const char* key) {
  if (!p) throw ConfigError(std::string("missing ") + key + " (flag or config key)");
  return *p;
}

CaptionOptions caption_options(const RunConfig& cfg, std::string_view captioner, const fs::path& images_root) {
  CaptionOptions opts;
  opts.seed = cfg.train.seed;
  opts.images_root = images_root;
  opts.parallelism = cfg.caption_parallelism;
  if (captioner == "stub") return opts;
  if (captioner != "remote") throw ArgumentError("unknown captioner '" + std::string(captioner) + "' (stub | remote)");
  opts.remote = true;
  opts.endpoint.base_url = cfg.caption_url;
  if (const char* env = std::getenv("T2I_FORGE_CAPTION_URL"); env && *env) opts.endpoint.base_url = env;
  if (opts.endpoint.base_url.empty())
    throw ConfigError("remote captioning needs caption_url or T2I_FORGE_CAPTION_URL");
  opts.endpoint.timeout_s = cfg.caption_timeout;
  opts.endpoint.max_retries = cfg.caption_retries;
  return opts;
}

void print_pattern_counts(const DatasetManifest& m) {
  const auto counts = pattern_counts(m);
  for (auto p : kSinglePatterns) {
    auto it = counts.find(p);
    std::cout << to_string(p) << ' ' << (it == counts.end() ? 0 : it->second) << '\n';
  }
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

}  // namespace

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig cfg;
  if (g.config) cfg = load_run_config(*g.config);
  for (const auto& kv : g.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.train.seed = *g.seed;
  if (g.threads) {
    if (*g.threads < 0) throw ArgumentError("--threads must be >= 0");
    cfg.threads = *g.threads;
  }
  return cfg;
}

int cmd_toy_dataset(const GlobalOptions& g, const ToyDatasetArgs& a) {
  const RunConfig cfg = resolve_config(g);
  ThreadCountGuard guard(cfg.threads);
  const auto toy = write_toy_dataset(a.out, a.n_per_class, cfg.train.seed);
  std::cout << "wrote " << toy.manifest.records.size() << " records to " << (a.out / "manifest.jsonl").string()
            << '\n';
  return 0;
}

int cmd_curate(const GlobalOptions& g, const CurateArgs& a) {
  RunConfig cfg = resolve_config(g);
  apply_opt(cfg, "manifest", a.manifest);
  apply_opt(cfg, "images_root", a.images_root);
  ThreadCountGuard guard(cfg.threads);

  const auto setting = parse_cutmix_pattern(a.setting);
  if (!setting) throw ArgumentError("unknown --setting '" + a.setting + "'");
  const fs::path manifest_path = need_path(cfg.manifest, "manifest");
  const fs::path root = cfg.images_root.value_or(manifest_path.parent_path());
  const fs::path out = a.out.value_or(root / "manifest.cutmix.jsonl");

  const auto base = read_manifest(manifest_path);
  auto curated = curate_cutmix(base, root, *setting, a.count, cfg.train.seed);
  curated = caption_missing(curated, caption_options(cfg, a.captioner, root));
  ensure_parent(out);
  write_manifest(curated, out);
  print_pattern_counts(curated);
  return 0;
}

int cmd_caption(const GlobalOptions& g, const CaptionArgs& a) {
  RunConfig cfg = resolve_config(g);
  apply_opt(cfg, "manifest", a.manifest);
  apply_opt(cfg, "images_root", a.images_root);
  ThreadCountGuard guard(cfg.threads);

  const fs::path manifest_path = need_path(cfg.manifest, "manifest");
  const fs::path root = cfg.images_root.value_or(manifest_path.parent_path());
  const auto m = caption_missing(read_manifest(manifest_path), caption_options(cfg, a.captioner, root));
  const fs::path out = a.out.value_or(manifest_path);
  ensure_parent(out);
  write_manifest(m, out);
  std::cout << "captions " << m.captions.size() << '\n';
  return 0;
}

int cmd_train(const GlobalOptions& g, const TrainArgs& a) {
  RunConfig cfg = resolve_config(g);
  apply_opt(cfg, "manifest", a.manifest);
  apply_opt(cfg, "images_root", a.images_root);
  apply_opt(cfg, "augment", a.augment);
  apply_opt(cfg, "steps", a.steps);
  apply_opt(cfg, "batch", a.batch);
  apply_opt(cfg, "learning_rate", a.learning_rate);
  apply_opt(cfg, "tau", a.tau);
  apply_opt(cfg, "aug_prob", a.aug_prob);
  apply_opt(cfg, "crop_prob", a.crop_prob);
  apply_opt(cfg, "uncond_drop", a.uncond_drop);
  apply_opt(cfg, "hidden", a.hidden);
  ThreadCountGuard guard(cfg.threads);
  validate(cfg.train);

  const fs::path manifest_path = need_path(cfg.manifest, "manifest");
  const fs::path root = cfg.images_root.value_or(manifest_path.parent_path());
  const auto manifest = read_manifest(manifest_path);
  if (const auto v = validate_manifest(manifest); !v.empty())
    throw ValidationError(v.front().record_id + ": " + v.front().rule + ": " + v.front().message);
  const auto images = load_images(manifest, root);
  const ImageLookup lookup = [&images](const std::string& id) -> const Image& { return images.at(id); };

  const Dataset original = dataset_from_manifest(manifest, lookup, {ImageSource::Original});
  Dataset curated;
  AugmentedSource aug = AugmentedSource::none();
  switch (cfg.augment) {
    case AugmentKind::None:
      cfg.train.gate.aug_prob = 0.0;
      break;
    case AugmentKind::CutMix:
      curated = dataset_from_manifest(manifest, lookup, {ImageSource::CutMix});
      aug = AugmentedSource::from(curated);
      break;
    case AugmentKind::Crop:
      aug = AugmentedSource::crops(cfg.grid_w, cfg.grid_h);
      break;
  }

  const auto result = train(cfg.train, original, aug);
  ensure_parent(a.out);
  write_checkpoint(a.out, result.denoiser, cfg.train);

  const fs::path csv = a.loss_csv.value_or(fs::path(a.out).replace_extension(".loss.csv"));
  ensure_parent(csv);
  std::ofstream f(csv, std::ios::binary);
  if (!f) throw IoError("cannot write " + csv.string());
  f << "step,loss,n_aug\n";
  char buf[64];
  for (const auto& r : result.reports) {
    std::snprintf(buf, sizeof buf, "%.9g", r.loss);
    f << r.step << ',' << buf << ',' << r.n_aug << '\n';
  }
  if (!f) throw IoError("write failed: " + csv.string());
  if (!result.reports.empty()) std::cout << "final loss " << result.reports.back().loss << '\n';
  std::cout << "checkpoint " << a.out.string() << '\n';
  return 0;
}

int cmd_sample(const GlobalOptions& g, const SampleArgs& a) {
  RunConfig cfg = resolve_config(g);
  apply_opt(cfg, "guidance", a.guidance);
  ThreadCountGuard guard(cfg.threads);
  if (!(cfg.guidance >= 0.0)) throw ArgumentError("guidance must be >= 0");

  const auto ckpt = read_checkpoint(a.checkpoint);
  const NoiseSchedule schedule{ckpt.denoiser.shape().horizon};
  fs::create_directories(a.out);
  for (std::size_t i = 0; i < a.count; ++i) {
    const auto r = sample(ckpt.denoiser, a.caption, schedule, cfg.guidance, derive_seed(cfg.train.seed, i));
    char name[32];
    std::snprintf(name, sizeof name, "sample-%04zu.png", i);
    write_png(a.out / name, r.image);
  }
  std::cout << "wrote " << a.count << " samples to " << a.out.string() << '\n';
  return 0;
}

int cmd_eval(const GlobalOptions& g, const EvalArgs& a) {
  RunConfig cfg = resolve_config(g);
  apply_opt(cfg, "k", a.k);
  ThreadCountGuard guard(cfg.threads);
  if (a.image_feats.has_value() != a.text_feats.has_value())
    throw ArgumentError("--image-feats and --text-feats go together");

  const auto real = read_features(a.real);
  const auto fake = read_features(a.fake);
  if (real.d != fake.d) throw ArgumentError("feature dims differ: " + std::to_string(real.d) + " vs " + std::to_string(fake.d));
  const double fid = frechet_distance(fit_gaussian(real), fit_gaussian(fake));
  const auto pr = prdc(real, fake, cfg.k);

  nlohmann::ordered_json j;
  j["fid"] = fid;
  j["precision"] = pr.precision;
  j["recall"] = pr.recall;
  j["density"] = pr.density;
  j["coverage"] = pr.coverage;
  if (a.image_feats)
    j["paired_cosine"] = paired_cosine_score(read_features(*a.image_feats), read_features(*a.text_feats));
  else
    j["paired_cosine"] = nullptr;

  const std::string text = j.dump() + "\n";
  if (a.out) {
    ensure_parent(*a.out);
    std::ofstream f(*a.out, std::ios::binary);
    if (!(f << text)) throw IoError("cannot write " + a.out->string());
  } else {
    std::cout << text;
  }
  return 0;
}

int cmd_ablate(const GlobalOptions& g, const AblateArgs& a) {
  RunConfig cfg = resolve_config(g);
  apply_opt(cfg, "steps", a.steps);
  apply_opt(cfg, "batch", a.batch);
  ThreadCountGuard guard(cfg.threads);

  const auto axis = parse_ablation_axis(a.axis);
  if (!axis) throw ArgumentError("unknown --axis '" + a.axis + "' (tau | aug_prob | pattern)");
  std::vector<std::string> grid;
  if (a.grid) {
    std::stringstream ss(*a.grid);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) grid.push_back(item);
  } else {
    grid = default_grid(*axis);
  }
  if (grid.empty()) throw ArgumentError("empty ablation grid");

  AblationBase base;
  base.train = cfg.train;
  base.toy_per_class = a.toy_per_class;
  base.cutmix_count = a.cutmix_count;
  const auto report = run_ablation(*axis, grid, base);

  ensure_parent(a.out);
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw IoError("cannot write " + a.out.string());
  write_ablation_csv(report, f);
  if (!f) throw IoError("write failed: " + a.out.string());
  std::size_t failed = 0;
  for (const auto& r : report.rows) failed += r.ok ? 0 : 1;
  std::cout << report.rows.size() << " rows, " << failed << " failed, csv " << a.out.string() << '\n';
  return failed == 0 ? 0 : 2;
}

}  // namespace t2i::cli
