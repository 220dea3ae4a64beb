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

// Dictionary-based medical entity lexicon and matcher.
//
// Surfaces are normalized (lowercase, single internal spaces, trimmed) and
// compiled into a character trie. FindEntities does leftmost-longest,
// non-overlapping, case-insensitive matching where matches must start and end
// on word boundaries (text edges or alphanumeric/non-alphanumeric
// transitions). A whitespace run in the text matches a single space in a
// surface.

#ifndef RADSUM_ENTITY_LEXICON_HPP_
#define RADSUM_ENTITY_LEXICON_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace radsum {

enum class LexiconLevel { kWord, kPhrase };

std::string_view LexiconLevelName(LexiconLevel level);
LexiconLevel ParseLexiconLevel(std::string_view name);

struct LexiconEntry {
  std::string concept_id;
  std::string surface;  // normalized
};

struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string surface;
  std::string concept_id;

  bool operator==(const EntitySpan&) const = default;
};

// Counters filled by FindEntities for throughput checks.
struct MatchStats {
  std::size_t trie_steps = 0;
  std::size_t start_positions = 0;
};

std::string NormalizeSurface(std::string_view surface);

class EntityLexicon {
 public:
  EntityLexicon() = default;

  // Normalizes and deduplicates (first concept id wins). Entries that do not
  // fit the level, or are blank after normalization, are dropped. Every drop
  // or duplicate appends a message to `warnings` when given. Does not throw on
  // an empty result; Load does.
  static EntityLexicon FromEntries(const std::vector<LexiconEntry>& entries,
                                   LexiconLevel level,
                                   std::vector<std::string>* warnings = nullptr);

  // Reads a `concept_id<TAB>surface` file. '#' lines and blank lines are
  // skipped. Throws kParseError on a malformed row, kEmptyLexicon if nothing
  // survives, kIoError if the file cannot be read.
  static EntityLexicon Load(const std::filesystem::path& path, LexiconLevel level,
                            std::vector<std::string>* warnings = nullptr);

  // Every whitespace-separated word of every phrase, each tagged with the
  // concept id of the phrase it was first seen in.
  EntityLexicon DeriveWordLevel() const;

  std::vector<EntitySpan> FindEntities(std::string_view text,
                                       MatchStats* stats = nullptr) const;

  void Save(const std::filesystem::path& path) const;

  LexiconLevel level() const { return level_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t max_surface_length() const { return max_surface_length_; }

  // Index into entries() for a normalized surface.
  std::optional<std::size_t> IndexOf(std::string_view surface) const;

  // sha256 of the canonical TSV serialization.
  std::string ContentHash() const;

 private:
  struct Node {
    std::int32_t entry = -1;  // entry terminating here
  };

  void Add(LexiconEntry entry);
  std::uint32_t Child(std::uint32_t node, unsigned char c) const;

  LexiconLevel level_ = LexiconLevel::kPhrase;
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_surface_;
  std::vector<Node> nodes_{Node{}};
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::size_t max_surface_length_ = 0;
};

}  // namespace radsum

#endif  // RADSUM_ENTITY_LEXICON_HPP_
