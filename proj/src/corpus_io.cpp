// Copyright 2026 The radsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "radsum/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "radsum/error.hpp"
#include "radsum/file_util.hpp"
#include "radsum/hash.hpp"
#include "radsum/random.hpp"

namespace radsum {

std::vector<Json> ParseJsonl(std::string_view contents, std::string_view origin) {
  std::vector<Json> records;
  std::size_t begin = 0;
  std::size_t line_no = 0;
  while (begin < contents.size()) {
    std::size_t nl = contents.find('\n', begin);
    if (nl == std::string_view::npos) nl = contents.size();
    ++line_no;
    std::string_view line = contents.substr(begin, nl - begin);
    begin = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      Json j = Json::parse(line);
      if (!j.is_object()) {
        throw Error(ErrorCode::kParseError, std::string(origin) + ":" +
                                                std::to_string(line_no) + ": not an object");
      }
      records.push_back(std::move(j));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<Json> ReadJsonl(const std::filesystem::path& path) {
  return ParseJsonl(ReadFile(path), path.string());
}

std::string DumpJsonl(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out.push_back('\n');
  }
  return out;
}

void WriteJsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
  WriteFileAtomic(path, DumpJsonl(records));
}

std::string StringField(const Json& j, std::string_view field) {
  auto it = j.find(std::string(field));
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "record lacks string field \"" + std::string(field) + "\"");
  }
  return it->get<std::string>();
}

Json RawReportJson(const RawReport& report) {
  Json j;
  j["id"] = report.id;
  j["text"] = report.text;
  return j;
}

RawReport RawReportFromJson(const Json& j) {
  return RawReport{StringField(j, "id"), StringField(j, "text"), CorpusSource::kRetrain};
}

Json SectionedJson(const SectionedReport& report) {
  Json sections = Json::array();
  for (const auto& s : report.sections) {
    Json e;
    e["name"] = s.name;
    e["body"] = s.body;
    e["start"] = s.start;
    e["end"] = s.end;
    sections.push_back(std::move(e));
  }
  Json j;
  j["id"] = report.id;
  j["sections"] = std::move(sections);
  return j;
}

Json PairJson(const SummPair& pair) {
  Json j;
  j["id"] = pair.id;
  j["input"] = pair.input_text;
  j["target"] = pair.target_text;
  return j;
}

Json RetrainJson(std::string_view id, std::string_view text) {
  Json j;
  j["id"] = id;
  j["text"] = text;
  return j;
}

Json MaskedExampleJson(const MaskedExample& example) {
  Json j;
  j["id"] = example.id;
  j["input_ids"] = example.input_ids;
  j["mask_positions"] = example.mask_positions;
  j["originals"] = example.originals;
  return j;
}

MaskedExample MaskedExampleFromJson(const Json& j) {
  MaskedExample ex;
  try {
    ex.id = StringField(j, "id");
    ex.input_ids = j.at("input_ids").get<std::vector<TokenId>>();
    ex.mask_positions = j.at("mask_positions").get<std::vector<std::size_t>>();
    ex.originals = j.at("originals").get<std::vector<TokenId>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("masked example: ") + e.what());
  }
  if (ex.mask_positions.size() != ex.originals.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "record '" + ex.id + "': mask_positions and originals differ in length");
  }
  for (std::size_t k = 0; k < ex.mask_positions.size(); ++k) {
    if (ex.mask_positions[k] >= ex.input_ids.size() ||
        (k > 0 && ex.mask_positions[k] <= ex.mask_positions[k - 1])) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "record '" + ex.id + "': mask positions unsorted or out of range");
    }
  }
  return ex;
}

std::string NormalizedRecordText(const Json& record) {
  std::string raw;
  bool any_string = false;
  for (const auto& [key, value] : record.items()) {
    if (key == "id" || !value.is_string()) continue;
    if (any_string) raw.push_back(' ');
    raw += value.get<std::string>();
    any_string = true;
  }
  if (!any_string) {
    Json rest = record;
    rest.erase("id");
    raw = rest.dump();
  }
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string NearDuplicateKey(const Json& record) {
  return Sha256Hex(NormalizedRecordText(record));
}

SplitSpec SplitSpec::Parse(std::string_view text, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t comma = text.find(',', begin);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(begin, comma - begin);
    begin = comma + 1;
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= item.size()) {
      throw Error(ErrorCode::kInvalidSplitSpec,
                  "expected name=size or name=ratio, got '" + std::string(item) + "'");
    }
    SplitPart part;
    part.name = std::string(item.substr(0, eq));
    std::string value(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      if (value.find_first_of(".eE") != std::string::npos) {
        part.ratio = std::stod(value, &used);
      } else {
        if (value.front() == '-') throw std::invalid_argument("negative");
        part.size = static_cast<std::size_t>(std::stoull(value, &used));
      }
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidSplitSpec, "bad split value '" + value + "'");
    }
    spec.parts.push_back(std::move(part));
    if (comma == text.size()) break;
  }
  return spec;
}

std::string SplitManifest::ToJson() const {
  Json splits_json = Json::array();
  for (const auto& s : splits) {
    Json e;
    e["name"] = s.name;
    e["count"] = s.count;
    e["ids_file"] = s.ids_file;
    e["sha256"] = s.sha256;
    splits_json.push_back(std::move(e));
  }
  Json m;
  m["seed"] = seed;
  m["splits"] = std::move(splits_json);
  m["near_duplicates_dropped"] = near_duplicates_dropped;
  return m.dump() + "\n";
}

SplitResult SplitDataset(const std::vector<Json>& records, const SplitSpec& spec) {
  if (spec.parts.empty()) throw Error(ErrorCode::kInvalidSplitSpec, "no splits requested");
  std::set<std::string> names;
  double ratio_sum = 0.0;
  for (const auto& p : spec.parts) {
    if (p.name.empty() || !names.insert(p.name).second) {
      throw Error(ErrorCode::kInvalidSplitSpec, "split names must be unique and non-empty");
    }
    if (!p.size && !p.ratio) throw Error(ErrorCode::kInvalidSplitSpec, p.name + ": no size");
    if (p.ratio) {
      if (!(*p.ratio >= 0.0 && *p.ratio <= 1.0)) {
        throw Error(ErrorCode::kInvalidSplitSpec, p.name + ": ratio outside [0, 1]");
      }
      ratio_sum += *p.ratio;
    }
  }
  if (ratio_sum > 1.0 + 1e-9) {
    throw Error(ErrorCode::kInvalidSplitSpec, "split ratios sum above 1");
  }

  std::set<std::string> ids;
  std::set<std::string> keys;
  std::vector<std::size_t> kept;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string id = StringField(records[i], "id");
    if (!ids.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId, "id '" + id + "' appears twice");
    }
    if (!keys.insert(NearDuplicateKey(records[i])).second) {
      ++dropped;
      continue;
    }
    kept.push_back(i);
  }

  const std::size_t n = kept.size();
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& p : spec.parts) {
    const std::size_t size =
        p.size ? *p.size : static_cast<std::size_t>(std::floor(*p.ratio * static_cast<double>(n)));
    sizes.push_back(size);
    total += size;
  }
  if (total > n) {
    throw Error(ErrorCode::kInsufficientRecords,
                "requested " + std::to_string(total) + " records, corpus has " +
                    std::to_string(n) + " distinct");
  }

  Rng rng(spec.seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(kept[i - 1], kept[static_cast<std::size_t>(rng.Below(i))]);
  }

  SplitResult result;
  result.manifest.seed = spec.seed;
  result.manifest.near_duplicates_dropped = dropped;
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < spec.parts.size(); ++s) {
    std::vector<Json> part;
    SplitEntry entry;
    entry.name = spec.parts[s].name;
    entry.count = sizes[s];
    entry.ids_file = entry.name + ".ids";
    for (std::size_t k = 0; k < sizes[s]; ++k) {
      const Json& r = records[kept[cursor++]];
      entry.ids.push_back(r["id"].get<std::string>());
      part.push_back(r);
    }
    entry.sha256 = Sha256Hex(DumpJsonl(part));
    result.manifest.splits.push_back(std::move(entry));
    result.splits.push_back(std::move(part));
  }
  return result;
}

void WriteSplits(const SplitResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  for (std::size_t s = 0; s < result.splits.size(); ++s) {
    const SplitEntry& entry = result.manifest.splits[s];
    WriteJsonl(dir / (entry.name + ".jsonl"), result.splits[s]);
    std::string ids;
    for (const auto& id : entry.ids) ids += id + "\n";
    WriteFileAtomic(dir / entry.ids_file, ids);
  }
  WriteFileAtomic(dir / "manifest.json", result.manifest.ToJson());
}

namespace {

std::vector<std::string> FieldNames(const Json& j) {
  std::vector<std::string> names;
  for (const auto& [key, value] : j.items()) names.push_back(key);
  std::sort(names.begin(), names.end());
  return names;
}

struct Occurrence {
  std::size_t split;
  std::string id;
};

void CollectPairs(const std::map<std::string, std::vector<Occurrence>>& groups,
                  const std::vector<NamedSplit>& splits, std::vector<Collision>& out) {
  for (const auto& [key, occ] : groups) {
    for (std::size_t a = 0; a < occ.size(); ++a) {
      for (std::size_t b = a + 1; b < occ.size(); ++b) {
        if (occ[a].split == occ[b].split) continue;
        out.push_back(Collision{key, splits[occ[a].split].first, occ[a].id,
                                splits[occ[b].split].first, occ[b].id});
      }
    }
  }
}

}  // namespace

CollisionReport VerifyDisjoint(const std::vector<NamedSplit>& splits) {
  std::optional<std::vector<std::string>> schema;
  std::map<std::string, std::vector<Occurrence>> by_id;
  std::map<std::string, std::vector<Occurrence>> by_text;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    for (const Json& r : splits[s].second) {
      auto fields = FieldNames(r);
      if (!schema) {
        schema = fields;
      } else if (*schema != fields) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "split '" + splits[s].first + "' has records with a different field set");
      }
      std::string id = StringField(r, "id");
      by_id[id].push_back(Occurrence{s, id});
      by_text[NearDuplicateKey(r)].push_back(Occurrence{s, id});
    }
  }
  CollisionReport report;
  CollectPairs(by_id, splits, report.id_collisions);
  CollectPairs(by_text, splits, report.text_collisions);
  return report;
}

CollisionReport VerifyDisjointFiles(const std::vector<std::filesystem::path>& files) {
  std::vector<NamedSplit> splits;
  for (const auto& f : files) splits.emplace_back(f.filename().string(), ReadJsonl(f));
  return VerifyDisjoint(splits);
}

}  // namespace radsum
