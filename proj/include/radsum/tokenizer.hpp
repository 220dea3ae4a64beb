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

// Deterministic subword tokenizer with atomic entity tokens.
//
// Vocabulary files hold one token per line; the line number is the id. The
// first five lines are the special tokens below. The base vocabulary must
// contain every printable non-space ASCII character as its own token, so
// greedy longest-prefix encoding never needs <unk> for printable input.
//
// Tokens carry no word-boundary marker. TokenSequence::word_starts records
// which tokens were preceded by a space, and Decode reinserts exactly those
// spaces.

#ifndef RADSUM_TOKENIZER_HPP_
#define RADSUM_TOKENIZER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "radsum/entity_lexicon.hpp"

namespace radsum {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr TokenId kMaskId = 4;
inline constexpr TokenId kNumSpecialTokens = 5;
inline constexpr std::array<std::string_view, 5> kSpecialTokens = {
    "<pad>", "<s>", "</s>", "<unk>", "<mask>"};
inline constexpr std::string_view kMaskRendering = "[MASK]";

inline constexpr bool IsSpecialId(TokenId id) {
  return id >= 0 && id < kNumSpecialTokens;
}

class SubwordTrie;

class Vocabulary {
 public:
  // Validates the token list: specials first, no duplicates or empty tokens,
  // printable coverage. Throws kInvalidVocabulary.
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  // Specials, then printable characters, then `subwords` (duplicates skipped).
  static Vocabulary MakeBase(const std::vector<std::string>& subwords);

  // Reads a vocabulary file and, optionally, the extension manifest written
  // next to it (restores base_size and entity ids).
  static Vocabulary Load(const std::filesystem::path& vocab_path,
                         const std::optional<std::filesystem::path>& manifest_path =
                             std::nullopt);

  void Save(const std::filesystem::path& vocab_path) const;
  void SaveManifest(const std::filesystem::path& manifest_path) const;
  std::string ManifestJson() const;

  std::size_t size() const { return tokens_.size(); }
  // Ids below base_size participate in subword matching; ids appended by
  // extension only appear through the entity pass.
  std::size_t base_size() const { return base_size_; }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> Find(std::string_view token) const;

  const std::vector<TokenId>& entity_token_ids() const { return entity_ids_; }
  bool IsEntity(TokenId id) const;
  std::size_t added() const { return tokens_.size() - base_size_; }

  // sha256 of the vocabulary file contents.
  std::string ContentHash() const;

  const SubwordTrie& subwords() const { return *trie_; }

 private:
  friend Vocabulary ExtendVocab(const Vocabulary& vocab, const EntityLexicon& lexicon);

  void Index();
  void SetEntityIds(std::vector<TokenId> ids);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t base_size_ = 0;
  std::vector<TokenId> entity_ids_;  // sorted
  std::vector<bool> is_entity_;
  std::shared_ptr<const SubwordTrie> trie_;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<bool> word_starts;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

// Appends each lexicon surface that is not yet a token as one atomic token.
// Existing ids never move. The result's entity ids are the prior entity ids
// plus the ids of every lexicon surface.
Vocabulary ExtendVocab(const Vocabulary& vocab, const EntityLexicon& lexicon);

// Two passes: lexicon matches whose surface is a token become that single
// token; the rest is split on whitespace and encoded greedy longest-prefix.
// Matching is case-insensitive, so an entity written in another case decodes
// to its lowercase surface. Throws kUnencodableCharacter for bytes outside
// printable ASCII.
TokenSequence Encode(const Vocabulary& vocab, const EntityLexicon* lexicon,
                     std::string_view text);

// Drops specials except <mask>, which renders as "[MASK]". Throws
// kInvalidTokenId.
std::string Decode(const Vocabulary& vocab, const TokenSequence& seq);

}  // namespace radsum

#endif  // RADSUM_TOKENIZER_HPP_
