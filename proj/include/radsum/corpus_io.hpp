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

// JSONL corpus files, dataset splits and split-overlap verification.
//
// Canonical JSONL: UTF-8, one compact object per line with fields in schema
// order, every line newline-terminated.

#ifndef RADSUM_CORPUS_IO_HPP_
#define RADSUM_CORPUS_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "radsum/masker.hpp"
#include "radsum/report_parser.hpp"

namespace radsum {

using Json = nlohmann::ordered_json;

// Throws kIoError (unreadable) or kParseError (bad line, with line number).
std::vector<Json> ReadJsonl(const std::filesystem::path& path);
std::vector<Json> ParseJsonl(std::string_view contents, std::string_view origin = "<memory>");
std::string DumpJsonl(const std::vector<Json>& records);
void WriteJsonl(const std::filesystem::path& path, const std::vector<Json>& records);

// Record schemas.
Json RawReportJson(const RawReport& report);
RawReport RawReportFromJson(const Json& j);
Json SectionedJson(const SectionedReport& report);
Json PairJson(const SummPair& pair);
Json RetrainJson(std::string_view id, std::string_view text);
Json MaskedExampleJson(const MaskedExample& example);
MaskedExample MaskedExampleFromJson(const Json& j);

// Required string field; throws kSchemaMismatch naming the field.
std::string StringField(const Json& j, std::string_view field);

// Lowercased, whitespace-collapsed text of a record: its string fields other
// than "id" joined by spaces, or the compact dump of the remaining fields
// when it has none.
std::string NormalizedRecordText(const Json& record);
// sha256 of NormalizedRecordText.
std::string NearDuplicateKey(const Json& record);

struct SplitPart {
  std::string name;
  std::optional<std::size_t> size;
  std::optional<double> ratio;  // used when size is unset; floor(ratio * n)
};

struct SplitSpec {
  std::vector<SplitPart> parts;
  std::uint64_t seed = 0;

  // "train=70,val=20,test=10" or "train=0.8,val=0.1,test=0.1".
  static SplitSpec Parse(std::string_view text, std::uint64_t seed);
};

struct SplitEntry {
  std::string name;
  std::size_t count = 0;
  std::string ids_file;
  std::string sha256;  // of the split's JSONL bytes
  std::vector<std::string> ids;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  std::vector<SplitEntry> splits;
  std::size_t near_duplicates_dropped = 0;

  std::string ToJson() const;
};

struct SplitResult {
  SplitManifest manifest;
  std::vector<std::vector<Json>> splits;  // parallel to manifest.splits
};

// Drops near-duplicates (first occurrence kept), shuffles under the seed and
// assigns contiguous ranges. Throws kDuplicateId, kInvalidSplitSpec or
// kInsufficientRecords.
SplitResult SplitDataset(const std::vector<Json>& records, const SplitSpec& spec);

// Writes <name>.jsonl, <name>.ids and manifest.json under `dir`.
void WriteSplits(const SplitResult& result, const std::filesystem::path& dir);

struct Collision {
  std::string key;  // id, or normalized-text hash
  std::string split_a;
  std::string id_a;
  std::string split_b;
  std::string id_b;
};

struct CollisionReport {
  std::vector<Collision> id_collisions;
  std::vector<Collision> text_collisions;

  bool clean() const { return id_collisions.empty() && text_collisions.empty(); }
};

using NamedSplit = std::pair<std::string, std::vector<Json>>;

// Cross-split duplicate ids and near-duplicate texts, one entry per pair of
// occurrences in different splits. Throws kSchemaMismatch when records do not
// share one field set.
CollisionReport VerifyDisjoint(const std::vector<NamedSplit>& splits);
CollisionReport VerifyDisjointFiles(const std::vector<std::filesystem::path>& files);

}  // namespace radsum

#endif  // RADSUM_CORPUS_IO_HPP_
