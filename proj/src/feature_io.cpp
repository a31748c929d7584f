// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "t2i/errors.hpp"
#include "t2i/image.hpp"

namespace t2i {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 4;

}  // namespace

std::vector<std::uint8_t> encode_features(const FeatureSet& f) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (f.n > kMax || f.d > kMax) throw ArgumentError("feature set too large for the u32 header");
  if (f.data.size() != f.n * f.d) throw ArgumentError("feature data size does not match n x d");
  std::vector<std::uint8_t> out{'F', 'E', 'A', 'T', kFeatureFileVersion};
  out.reserve(kHeaderSize + 4 * f.data.size());
  put_u32(out, static_cast<std::uint32_t>(f.n));
  put_u32(out, static_cast<std::uint32_t>(f.d));
  for (double v : f.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

FeatureSet decode_features(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), "FEAT", 4) != 0) {
    throw ParseError("not a feature file (bad magic)");
  }
  if (bytes[4] != kFeatureFileVersion) throw ParseError("unsupported feature file version " + std::to_string(bytes[4]));
  const std::size_t n = get_u32(&bytes[5]);
  const std::size_t d = get_u32(&bytes[9]);
  if (bytes.size() - kHeaderSize != 4 * n * d) {
    throw ParseError("feature payload is " + std::to_string(bytes.size() - kHeaderSize) + " bytes, expected " +
                     std::to_string(4 * n * d));
  }
  FeatureSet f(n, d);
  for (std::size_t i = 0; i < n * d; ++i) f.data[i] = std::bit_cast<float>(get_u32(&bytes[kHeaderSize + 4 * i]));
  return f;
}

void write_features(const std::filesystem::path& path, const FeatureSet& features) {
  const auto bytes = encode_features(features);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("cannot write feature file " + path.string());
}

FeatureSet read_features(const std::filesystem::path& path) { return decode_features(read_file_bytes(path)); }

}  // namespace t2i
