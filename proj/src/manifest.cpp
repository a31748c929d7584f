// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "t2i/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "t2i/captioner.hpp"
#include "t2i/errors.hpp"

namespace t2i {

using ojson = nlohmann::ordered_json;

std::string tool_version() { return std::string("t2i-forge ") + T2I_FORGE_VERSION; }

const ImageRecord* DatasetManifest::find(std::string_view id) const {
  // Records are usually canonical (sorted), but hand-authored input may not be.
  auto it = std::find_if(records.begin(), records.end(), [&](const ImageRecord& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

std::vector<Violation> validate_manifest(const DatasetManifest& m) {
  std::vector<Violation> out;
  auto flag = [&out](const std::string& id, std::string rule, std::string msg) {
    out.push_back({id, std::move(rule), std::move(msg)});
  };

  std::map<std::string, const ImageRecord*> by_id;
  for (const auto& r : m.records) {
    if (r.id.empty()) flag(r.id, "id-nonempty", "record id is empty");
    if (!by_id.emplace(r.id, &r).second) flag(r.id, "id-unique", "duplicate record id");
    if (r.width <= 0 || r.height <= 0) flag(r.id, "dims-positive", "width and height must be > 0");

    const bool has_pattern = r.provenance && r.provenance->pattern;
    if (r.source == ImageSource::CutMix && !has_pattern) {
      flag(r.id, "cutmix-provenance", "cutmix record lacks provenance with a pattern");
    }
    if (r.source != ImageSource::CutMix && has_pattern) {
      flag(r.id, "cutmix-provenance", "non-cutmix record carries a cutmix pattern");
    }
    if (r.provenance) {
      const auto& p = *r.provenance;
      if (p.pattern) {
        if (!p.donor_id) flag(r.id, "provenance-donor", "pattern present but donor_id missing");
        if (!p.placement) flag(r.id, "provenance-placement", "pattern present but placement missing");
        if (*p.pattern == CutMixPattern::All) {
          flag(r.id, "pattern-single", "pattern 'all' is not valid on a single record");
        }
      }
      if (p.placement) {
        const auto& pl = *p.placement;
        if (pl.w < 1 || pl.h < 1 || pl.x < 0 || pl.y < 0 || pl.x + pl.w > r.width || pl.y + pl.h > r.height) {
          flag(r.id, "placement-bounds", "placement does not fit the record dimensions");
        }
      }
    }
  }

  for (const auto& c : m.captions) {
    auto it = by_id.find(c.image_id);
    if (it == by_id.end()) {
      flag(c.image_id, "caption-image", "caption references an unknown image id");
      continue;
    }
    if (c.kind == CaptionKind::AIO) {
      const auto& label = it->second->class_label;
      if (!label || label->empty() || c.text != aio_caption(*label)) {
        flag(c.image_id, "aio-template", "AIO caption does not match 'An image of <class>'");
      }
    }
  }
  return out;
}

void canonicalize(DatasetManifest& m) {
  std::stable_sort(m.records.begin(), m.records.end(),
                   [](const ImageRecord& a, const ImageRecord& b) { return a.id < b.id; });
  std::stable_sort(m.captions.begin(), m.captions.end(), [](const CaptionRecord& a, const CaptionRecord& b) {
    return std::tie(a.image_id, a.kind, a.text) < std::tie(b.image_id, b.kind, b.text);
  });
}

namespace {

ojson to_json(const ImageRecord& r) {
  ojson j;
  j["t"] = "img";
  j["id"] = r.id;
  j["path"] = r.path;
  j["width"] = r.width;
  j["height"] = r.height;
  if (r.class_label) j["class_label"] = *r.class_label;
  j["source"] = to_string(r.source);
  if (r.provenance) {
    const auto& p = *r.provenance;
    ojson pj;
    pj["base_id"] = p.base_id;
    if (p.donor_id) pj["donor_id"] = *p.donor_id;
    if (p.pattern) pj["pattern"] = to_string(*p.pattern);
    if (p.placement) {
      pj["placement"] = ojson{{"x", p.placement->x}, {"y", p.placement->y}, {"w", p.placement->w}, {"h", p.placement->h}};
    }
    pj["seed"] = p.seed;
    j["provenance"] = std::move(pj);
  }
  return j;
}

ojson to_json(const CaptionRecord& c) {
  ojson j;
  j["t"] = "cap";
  j["image_id"] = c.image_id;
  j["kind"] = to_string(c.kind);
  j["generator"] = c.generator;
  j["text"] = c.text;
  return j;
}

std::string validation_summary(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << v.size() << " violation(s)";
  for (const auto& x : v) os << "; [" << x.record_id << "] " << x.rule << ": " << x.message;
  return os.str();
}

class LineReader {
 public:
  LineReader(const ojson& j, std::size_t line) : j_(j), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line_) + ": " + msg);
  }

  const ojson& field(const char* name) const {
    auto it = j_.find(name);
    if (it == j_.end()) fail(std::string("missing field \"") + name + "\"");
    return *it;
  }

  std::string str(const char* name) const {
    const auto& v = field(name);
    if (!v.is_string()) fail(std::string("field \"") + name + "\" must be a string");
    return v.get<std::string>();
  }

  std::optional<std::string> opt_str(const char* name) const {
    if (!j_.contains(name)) return std::nullopt;
    return str(name);
  }

  int integer(const ojson& v, const char* name) const {
    if (!v.is_number_integer()) fail(std::string("field \"") + name + "\" must be an integer");
    return v.get<int>();
  }

  int integer(const char* name) const { return integer(field(name), name); }

  std::uint64_t u64(const ojson& v, const char* name) const {
    if (!v.is_number_unsigned()) fail(std::string("field \"") + name + "\" must be an unsigned integer");
    return v.get<std::uint64_t>();
  }

 private:
  const ojson& j_;
  std::size_t line_;
};

ImageRecord parse_record(const ojson& j, const LineReader& rd) {
  ImageRecord r;
  r.id = rd.str("id");
  r.path = rd.str("path");
  r.width = rd.integer("width");
  r.height = rd.integer("height");
  r.class_label = rd.opt_str("class_label");
  const auto src = parse_image_source(rd.str("source"));
  if (!src) rd.fail("unknown source \"" + rd.str("source") + "\"");
  r.source = *src;
  if (j.contains("provenance")) {
    const auto& pj = j["provenance"];
    if (!pj.is_object()) rd.fail("field \"provenance\" must be an object");
    AugmentationProvenance p;
    auto need = [&](const char* name) -> const ojson& {
      if (!pj.contains(name)) rd.fail(std::string("missing field \"provenance.") + name + "\"");
      return pj[name];
    };
    const auto& base = need("base_id");
    if (!base.is_string()) rd.fail("field \"provenance.base_id\" must be a string");
    p.base_id = base.get<std::string>();
    if (pj.contains("donor_id")) {
      if (!pj["donor_id"].is_string()) rd.fail("field \"provenance.donor_id\" must be a string");
      p.donor_id = pj["donor_id"].get<std::string>();
    }
    if (pj.contains("pattern")) {
      const auto pat = pj["pattern"].is_string() ? parse_cutmix_pattern(pj["pattern"].get<std::string>())
                                                 : std::nullopt;
      if (!pat) rd.fail("field \"provenance.pattern\" is not a known pattern");
      p.pattern = pat;
    }
    if (pj.contains("placement")) {
      const auto& pl = pj["placement"];
      if (!pl.is_object()) rd.fail("field \"provenance.placement\" must be an object");
      Placement place;
      for (auto [name, dst] : {std::pair{"x", &place.x}, {"y", &place.y}, {"w", &place.w}, {"h", &place.h}}) {
        if (!pl.contains(name)) rd.fail(std::string("missing field \"provenance.placement.") + name + "\"");
        *dst = rd.integer(pl[name], name);
      }
      p.placement = place;
    }
    p.seed = rd.u64(need("seed"), "provenance.seed");
    r.provenance = std::move(p);
  }
  return r;
}

CaptionRecord parse_caption(const LineReader& rd) {
  CaptionRecord c;
  c.image_id = rd.str("image_id");
  const auto kind = parse_caption_kind(rd.str("kind"));
  if (!kind) rd.fail("unknown caption kind \"" + rd.str("kind") + "\"");
  c.kind = *kind;
  c.generator = rd.str("generator");
  c.text = rd.str("text");
  return c;
}

}  // namespace

std::string manifest_to_string(const DatasetManifest& manifest) {
  if (auto v = validate_manifest(manifest); !v.empty()) throw ValidationError(validation_summary(v));
  DatasetManifest m = manifest;
  canonicalize(m);

  std::string out;
  ojson header;
  header["schema"] = kManifestSchema;
  header["seed"] = m.seed;
  header["created_by"] = m.created_by;
  out += header.dump();
  out += '\n';
  for (const auto& r : m.records) {
    out += to_json(r).dump();
    out += '\n';
  }
  for (const auto& c : m.captions) {
    out += to_json(c).dump();
    out += '\n';
  }
  return out;
}

std::size_t write_manifest(const DatasetManifest& manifest, std::ostream& out) {
  const std::string text = manifest_to_string(manifest);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("manifest sink write failed");
  return text.size();
}

std::size_t write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  const std::string text = manifest_to_string(manifest);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("cannot write manifest " + path.string());
  return text.size();
}

DatasetManifest read_manifest(std::istream& in) {
  DatasetManifest m;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError("line " + std::to_string(lineno) + ": expected a JSON object");
    LineReader rd(j, lineno);
    if (!have_header) {
      if (rd.str("schema") != kManifestSchema) rd.fail("unsupported schema \"" + rd.str("schema") + "\"");
      m.seed = rd.u64(rd.field("seed"), "seed");
      m.created_by = rd.opt_str("created_by").value_or("");
      have_header = true;
      continue;
    }
    const std::string t = rd.str("t");
    if (t == "img") {
      m.records.push_back(parse_record(j, rd));
    } else if (t == "cap") {
      m.captions.push_back(parse_caption(rd));
    } else {
      rd.fail("unknown line type \"" + t + "\"");
    }
  }
  if (!have_header) throw ParseError("line 1: missing header line");
  if (auto v = validate_manifest(m); !v.empty()) throw ValidationError(validation_summary(v));
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open manifest " + path.string());
  return read_manifest(f);
}

std::map<CutMixPattern, std::size_t> pattern_counts(const DatasetManifest& manifest) {
  std::map<CutMixPattern, std::size_t> counts;
  for (const auto& r : manifest.records) {
    if (r.source == ImageSource::CutMix && r.provenance && r.provenance->pattern) ++counts[*r.provenance->pattern];
  }
  return counts;
}

}  // namespace t2i
