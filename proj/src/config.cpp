// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "t2i/errors.hpp"

namespace t2i {

std::optional<AugmentKind> parse_augment_kind(std::string_view s) {
  if (s == "none") return AugmentKind::None;
  if (s == "cutmix") return AugmentKind::CutMix;
  if (s == "crop") return AugmentKind::Crop;
  return std::nullopt;
}

const std::map<std::string, std::string>& run_config_keys() {
  static const std::map<std::string, std::string> keys = {
      {"manifest", "dataset manifest (JSONL)"},
      {"images_root", "directory the manifest paths are relative to"},
      {"out_dir", "output directory"},
      {"horizon", "diffusion horizon T"},
      {"tau", "gate threshold"},
      {"aug_prob", "augmentation probability above tau"},
      {"crop_prob", "crop probability (crop branch is not gated)"},
      {"augment", "none | cutmix | crop"},
      {"grid_w", "crop token grid width"},
      {"grid_h", "crop token grid height"},
      {"batch", "batch size"},
      {"steps", "training steps"},
      {"learning_rate", "SGD learning rate"},
      {"uncond_drop", "probability of training on the null caption"},
      {"hidden", "denoiser hidden width"},
      {"text_dim", "text embedding width"},
      {"seed", "run seed"},
      {"k", "PRDC neighbour count"},
      {"guidance", "classifier-free guidance scale"},
      {"caption_url", "captioning endpoint base URL"},
      {"caption_timeout", "captioning request timeout (s)"},
      {"caption_retries", "captioning retries (<= 10)"},
      {"caption_parallelism", "concurrent captioning requests"},
      {"threads", "OpenMP threads (0 = default)"},
  };
  return keys;
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

std::filesystem::path existing_path(std::string_view key, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  if (!std::filesystem::exists(p)) {
    throw ConfigError(std::string(key) + " path does not exist: " + p.string());
  }
  return p;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  auto& t = c.train;
  if (key == "manifest") c.manifest = existing_path(key, value);
  else if (key == "images_root") c.images_root = existing_path(key, value);
  else if (key == "out_dir") c.out_dir = std::filesystem::path(std::string(value));
  else if (key == "horizon") t.schedule.horizon = parse_number<int>(key, value);
  else if (key == "tau") t.gate.tau = parse_number<int>(key, value);
  else if (key == "aug_prob") t.gate.aug_prob = parse_number<double>(key, value);
  else if (key == "crop_prob") t.crop_prob = parse_number<double>(key, value);
  else if (key == "augment") {
    const auto kind = parse_augment_kind(value);
    if (!kind) throw ConfigError("augment must be none, cutmix or crop");
    c.augment = *kind;
  }
  else if (key == "grid_w") c.grid_w = parse_number<int>(key, value);
  else if (key == "grid_h") c.grid_h = parse_number<int>(key, value);
  else if (key == "batch") t.batch = parse_number<std::size_t>(key, value);
  else if (key == "steps") t.steps = parse_number<std::size_t>(key, value);
  else if (key == "learning_rate") t.learning_rate = parse_number<double>(key, value);
  else if (key == "uncond_drop") t.uncond_drop = parse_number<double>(key, value);
  else if (key == "hidden") t.hidden = parse_number<int>(key, value);
  else if (key == "text_dim") t.text_dim = parse_number<int>(key, value);
  else if (key == "seed") t.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "k") c.k = parse_number<std::size_t>(key, value);
  else if (key == "guidance") c.guidance = parse_number<double>(key, value);
  else if (key == "caption_url") c.caption_url = std::string(value);
  else if (key == "caption_timeout") c.caption_timeout = parse_number<double>(key, value);
  else if (key == "caption_retries") {
    c.caption_retries = parse_number<int>(key, value);
    if (c.caption_retries < 0 || c.caption_retries > 10) throw ConfigError("caption_retries must be in [0, 10]");
  }
  else if (key == "caption_parallelism") c.caption_parallelism = parse_number<int>(key, value);
  else if (key == "threads") c.threads = parse_number<int>(key, value);
  else throw ConfigError("unknown key '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      constexpr std::string_view kPrefix = "configuration error: ";
      std::string_view msg = e.what();
      if (msg.starts_with(kPrefix)) msg.remove_prefix(kPrefix.size());
      throw ConfigError("line " + std::to_string(lineno) + ": " + std::string(msg));
    }
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

}  // namespace t2i
