// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "t2i/errors.hpp"
#include "t2i/image.hpp"

namespace t2i {

namespace {

void put_f32_le(std::vector<std::uint8_t>& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

float get_f32_le(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Denoiser& denoiser, const TrainConfig& config) {
  const auto& s = denoiser.shape();
  nlohmann::ordered_json j;
  j["width"] = s.width;
  j["height"] = s.height;
  j["channels"] = s.channels;
  j["text_dim"] = s.text_dim;
  j["hidden"] = s.hidden;
  j["horizon"] = s.horizon;
  j["param_count"] = s.param_count();
  j["batch"] = config.batch;
  j["steps"] = config.steps;
  j["learning_rate"] = config.learning_rate;
  j["tau"] = config.gate.tau;
  j["aug_prob"] = config.gate.aug_prob;
  j["crop_prob"] = config.crop_prob;
  j["uncond_drop"] = config.uncond_drop;
  j["seed"] = config.seed;

  std::vector<std::uint8_t> out(kCheckpointMagic, kCheckpointMagic + kCheckpointMagicSize);
  const std::string line = j.dump() + "\n";
  out.insert(out.end(), line.begin(), line.end());
  out.reserve(out.size() + 4 * s.param_count());
  for (std::size_t i = 0; i < denoiser.params().size(); ++i) {
    const auto f = static_cast<float>(denoiser.params()[i]);
    if (!std::isfinite(f)) throw NumericError("parameter " + std::to_string(i) + " does not fit in float32");
    put_f32_le(out, f);
  }
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const Denoiser& denoiser, const TrainConfig& config) {
  const auto bytes = encode_checkpoint(denoiser, config);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("cannot write checkpoint " + path.string());
}

LoadedCheckpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCheckpointMagicSize || std::memcmp(bytes.data(), kCheckpointMagic, kCheckpointMagicSize) != 0) {
    throw ParseError("not a t2i-forge checkpoint");
  }
  std::size_t pos = kCheckpointMagicSize;
  std::size_t eol = pos;
  while (eol < bytes.size() && bytes[eol] != '\n') ++eol;
  if (eol == bytes.size()) throw ParseError("checkpoint config line is not terminated");
  std::string line(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(eol));

  DenoiserShape shape;
  try {
    const auto j = nlohmann::json::parse(line);
    shape.width = j.at("width").get<int>();
    shape.height = j.at("height").get<int>();
    shape.channels = j.at("channels").get<int>();
    shape.text_dim = j.at("text_dim").get<int>();
    shape.hidden = j.at("hidden").get<int>();
    shape.horizon = j.at("horizon").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint config: ") + e.what());
  }
  const std::size_t n = shape.param_count();
  pos = eol + 1;
  if (bytes.size() - pos != 4 * n) {
    throw ParseError("checkpoint holds " + std::to_string((bytes.size() - pos) / 4) + " parameters, expected " +
                     std::to_string(n));
  }
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = get_f32_le(&bytes[pos + 4 * i]);
  return {Denoiser(shape, std::move(theta)), std::move(line)};
}

LoadedCheckpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace t2i
