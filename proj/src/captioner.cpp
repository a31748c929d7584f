// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/captioner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "t2i/errors.hpp"
#include "t2i/image.hpp"
#include "t2i/rng.hpp"

namespace t2i {

namespace {

constexpr std::array<std::string_view, 16> kColors = {
    "red",    "orange", "yellow", "green", "teal",  "blue",  "purple", "pink",
    "brown",  "black",  "white",  "gray",  "golden", "silver", "beige", "crimson"};

constexpr std::array<std::string_view, 16> kRelations = {
    "next to",  "in front of", "behind",      "beside",      "above",       "below",
    "near",     "on top of",   "under",       "facing",      "leaning on",  "surrounded by",
    "across from", "close to", "far from",    "in the middle of"};

std::uint64_t hash_id(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string resolve_label(const std::string& id, const LabelIndex& labels) {
  auto it = labels.find(id);
  if (it == labels.end()) throw ArgumentError("no class label known for image '" + id + "'");
  return it->second;
}

}  // namespace

std::string aio_caption(std::string_view class_name) {
  if (class_name.empty()) throw ArgumentError("class name must be non-empty");
  return "An image of " + std::string(class_name);
}

CaptionPrompt prompt_for(ImageSource source) {
  if (source == ImageSource::CutMix) return {std::string(kCutMixPrompt), PromptTarget::CutMix};
  return {std::string(kPlainPrompt), PromptTarget::Plain};
}

std::span<const std::string_view> stub_colors() { return kColors; }
std::span<const std::string_view> stub_relations() { return kRelations; }

LabelIndex label_index(const DatasetManifest& manifest) {
  LabelIndex idx;
  for (const auto& r : manifest.records) {
    if (r.class_label) idx.emplace(r.id, *r.class_label);
  }
  return idx;
}

std::string stub_caption(const ImageRecord& record, std::uint64_t seed, const LabelIndex& labels) {
  if (!record.class_label && !record.provenance) {
    throw ArgumentError("record '" + record.id + "' has neither a class label nor provenance");
  }
  Rng rng(derive_seed(seed, hash_id(record.id)));
  const auto color = kColors[rng.uniform_int(kColors.size())];
  const auto relation = kRelations[rng.uniform_int(kRelations.size())];
  const auto backdrop = kColors[rng.uniform_int(kColors.size())];

  if (record.source == ImageSource::CutMix && record.provenance && record.provenance->donor_id) {
    const std::string base = resolve_label(record.provenance->base_id, labels);
    const std::string donor = resolve_label(*record.provenance->donor_id, labels);
    return "A " + std::string(color) + " " + base + " " + std::string(relation) + " a " + donor +
           " in a single scene with a " + std::string(backdrop) + " background";
  }
  const std::string label =
      record.class_label ? *record.class_label : resolve_label(record.provenance->base_id, labels);
  return "A " + std::string(color) + " " + label + " " + std::string(relation) + " a " + std::string(backdrop) +
         " background";
}

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ArgumentError("endpoint URL must include a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  SplitUrl out{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

std::string remote_caption(const CaptionerEndpoint& endpoint, std::span<const std::uint8_t> image,
                           const CaptionPrompt& prompt) {
  if (endpoint.max_retries < 0 || endpoint.max_retries > 10) {
    throw ArgumentError("max_retries must be in [0, 10]");
  }
  if (image.empty()) throw ArgumentError("image bytes must be non-empty");

  const auto url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto timeout = std::chrono::duration<double>(endpoint.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  nlohmann::json body;
  body["image_b64"] = httplib::detail::base64_encode(std::string(image.begin(), image.end()));
  body["prompt"] = prompt.text;
  const std::string payload = body.dump();

  double delay = endpoint.backoff_s;
  std::string last_failure;
  int last_status = 0;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      delay *= 2.0;
    }
    auto res = client.Post(url.prefix + "/caption", payload, "application/json");
    if (!res) {
      last_status = 0;
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw EndpointError(res->status, std::string("reply is not JSON: ") + e.what());
      }
      if (!reply.is_object() || !reply.contains("caption") || !reply["caption"].is_string()) {
        throw EndpointError(res->status, "reply lacks a string \"caption\" field");
      }
      return reply["caption"].get<std::string>();
    }
    if (res->status < 500) throw EndpointError(res->status, res->body);
    last_status = res->status;
    last_failure = res->body;
  }
  if (last_status != 0) throw EndpointError(last_status, last_failure);
  throw TransportError("captioner unreachable after " + std::to_string(endpoint.max_retries + 1) +
                       " attempts: " + last_failure);
}

std::map<std::string, std::string> remote_caption_all(const CaptionerEndpoint& endpoint,
                                                      const std::vector<CaptionJob>& jobs, int parallelism) {
  std::map<std::string, std::string> results;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || stop.load()) return;
      try {
        auto text = remote_caption(endpoint, jobs[i].image, jobs[i].prompt);
        std::lock_guard lock(mu);
        results[jobs[i].image_id] = std::move(text);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  const auto n = static_cast<std::size_t>(std::clamp(parallelism, 1, 64));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n, jobs.size()); ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

CaptionKind generated_kind(ImageSource source) {
  switch (source) {
    case ImageSource::Original: return CaptionKind::TA;
    case ImageSource::CutMix: return CaptionKind::CutMixTA;
    case ImageSource::Crop: return CaptionKind::CropTA;
  }
  return CaptionKind::TA;
}

DatasetManifest caption_missing(const DatasetManifest& manifest, const CaptionOptions& options) {
  DatasetManifest out = manifest;
  std::set<std::pair<std::string, CaptionKind>> have;
  for (const auto& c : manifest.captions) have.emplace(c.image_id, c.kind);
  const auto labels = label_index(manifest);

  // Originals and cutmix images first, so crops can reuse captions made here.
  std::vector<CaptionJob> jobs;
  for (const auto& r : manifest.records) {
    const CaptionKind kind = generated_kind(r.source);
    if (r.source == ImageSource::Crop || have.count({r.id, kind}) != 0) continue;
    if (options.remote) {
      jobs.push_back({r.id, read_file_bytes(options.images_root / r.path), prompt_for(r.source)});
    } else {
      out.captions.push_back({r.id, stub_caption(r, options.seed, labels), kind, "stub"});
    }
  }
  if (!jobs.empty()) {
    const auto texts = remote_caption_all(options.endpoint, jobs, options.parallelism);
    for (const auto& job : jobs) {
      const ImageRecord* r = manifest.find(job.image_id);
      out.captions.push_back({job.image_id, texts.at(job.image_id), generated_kind(r->source), "remote"});
    }
  }

  std::map<std::string, std::string> base_ta;
  canonicalize(out);
  for (const auto& c : out.captions) {
    if (c.kind == CaptionKind::TA) base_ta.try_emplace(c.image_id, c.text);
  }
  for (const auto& r : manifest.records) {
    if (r.source != ImageSource::Crop || have.count({r.id, CaptionKind::CropTA}) != 0) continue;
    if (!r.provenance) throw ArgumentError("crop record '" + r.id + "' lacks provenance");
    auto it = base_ta.find(r.provenance->base_id);
    if (it == base_ta.end()) throw ArgumentError("crop record '" + r.id + "': base image has no TA caption");
    out.captions.push_back({r.id, it->second, CaptionKind::CropTA, "reuse"});
  }
  canonicalize(out);
  return out;
}

}  // namespace t2i
