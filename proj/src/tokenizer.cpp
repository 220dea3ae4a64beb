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

#include "radsum/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "radsum/error.hpp"
#include "radsum/file_util.hpp"
#include "radsum/hash.hpp"

namespace radsum {

class SubwordTrie {
 public:
  void Insert(std::string_view token, TokenId id) {
    std::uint32_t node = 0;
    for (unsigned char c : token) {
      const auto key = (static_cast<std::uint64_t>(node) << 8) | c;
      auto it = edges_.find(key);
      if (it == edges_.end()) {
        const auto next = static_cast<std::uint32_t>(terminal_.size());
        terminal_.push_back(-1);
        it = edges_.emplace(key, next).first;
      }
      node = it->second;
    }
    terminal_[node] = id;
  }

  // Longest token that prefixes `s`; {-1, 0} when none.
  std::pair<TokenId, std::size_t> LongestPrefix(std::string_view s) const {
    std::uint32_t node = 0;
    TokenId best = -1;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto it = edges_.find((static_cast<std::uint64_t>(node) << 8) |
                            static_cast<unsigned char>(s[i]));
      if (it == edges_.end()) break;
      node = it->second;
      if (terminal_[node] >= 0) {
        best = terminal_[node];
        best_len = i + 1;
      }
    }
    return {best, best_len};
  }

 private:
  std::vector<TokenId> terminal_{-1};
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
};

namespace {

constexpr char kFirstPrintable = 0x21;
constexpr char kLastPrintable = 0x7e;

bool IsPrintable(char c) { return c >= 0x20 && c <= kLastPrintable; }
bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::shared_ptr<const SubwordTrie> BuildTrie(const std::vector<std::string>& tokens,
                                             std::size_t base_size) {
  auto trie = std::make_shared<SubwordTrie>();
  for (std::size_t id = kNumSpecialTokens; id < base_size; ++id) {
    const std::string& t = tokens[id];
    if (std::any_of(t.begin(), t.end(), IsSpace)) continue;
    trie->Insert(t, static_cast<TokenId>(id));
  }
  return trie;
}

}  // namespace

void Vocabulary::Index() {
  index_.clear();
  index_.reserve(tokens_.size());
  if (tokens_.size() < kSpecialTokens.size()) {
    throw Error(ErrorCode::kInvalidVocabulary, "vocabulary shorter than the special tokens");
  }
  for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
    if (tokens_[i] != kSpecialTokens[i]) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  "line " + std::to_string(i + 1) + " must be " +
                      std::string(kSpecialTokens[i]) + ", found '" + tokens_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty()) {
      throw Error(ErrorCode::kInvalidVocabulary, "empty token at id " + std::to_string(i));
    }
    if (t.find('\n') != std::string::npos || t.find('\r') != std::string::npos) {
      throw Error(ErrorCode::kInvalidVocabulary, "line break inside token " + std::to_string(i));
    }
    if (!index_.emplace(t, static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kInvalidVocabulary, "duplicate token '" + t + "'");
    }
  }
  for (char c = kFirstPrintable; c <= kLastPrintable; ++c) {
    if (!index_.count(std::string(1, c))) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  std::string("missing single-character token '") + c + "'");
    }
  }
}

void Vocabulary::SetEntityIds(std::vector<TokenId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  is_entity_.assign(tokens_.size(), false);
  for (TokenId id : ids) {
    if (id < kNumSpecialTokens || static_cast<std::size_t>(id) >= tokens_.size()) {
      throw Error(ErrorCode::kInvalidVocabulary, "entity id out of range: " + std::to_string(id));
    }
    is_entity_[static_cast<std::size_t>(id)] = true;
  }
  entity_ids_ = std::move(ids);
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.Index();
  v.base_size_ = v.tokens_.size();
  v.SetEntityIds({});
  v.trie_ = BuildTrie(v.tokens_, v.base_size_);
  return v;
}

Vocabulary Vocabulary::MakeBase(const std::vector<std::string>& subwords) {
  std::vector<std::string> tokens(kSpecialTokens.begin(), kSpecialTokens.end());
  std::unordered_map<std::string, bool> seen;
  for (const auto& t : tokens) seen[t] = true;
  for (char c = kFirstPrintable; c <= kLastPrintable; ++c) {
    tokens.emplace_back(1, c);
    seen[tokens.back()] = true;
  }
  for (const auto& s : subwords) {
    if (s.empty() || seen.count(s)) continue;
    seen[s] = true;
    tokens.push_back(s);
  }
  return FromTokens(std::move(tokens));
}

Vocabulary Vocabulary::Load(const std::filesystem::path& vocab_path,
                            const std::optional<std::filesystem::path>& manifest_path) {
  std::string contents = ReadFile(vocab_path);
  std::vector<std::string> tokens;
  std::size_t begin = 0;
  while (begin < contents.size()) {
    std::size_t nl = contents.find('\n', begin);
    if (nl == std::string::npos) nl = contents.size();
    tokens.emplace_back(contents, begin, nl - begin);
    begin = nl + 1;
  }
  Vocabulary v = FromTokens(std::move(tokens));
  if (!manifest_path) return v;

  nlohmann::json m;
  try {
    m = nlohmann::json::parse(ReadFile(*manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidVocabulary,
                manifest_path->string() + ": " + std::string(e.what()));
  }
  try {
    const auto base = m.at("base_size").get<std::size_t>();
    const auto added = m.at("added").get<std::size_t>();
    if (base < kNumSpecialTokens || base + added != v.size()) {
      throw Error(ErrorCode::kInvalidVocabulary,
                  "manifest sizes do not match " + vocab_path.string());
    }
    v.base_size_ = base;
    v.SetEntityIds(m.at("entity_token_ids").get<std::vector<TokenId>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidVocabulary,
                manifest_path->string() + ": " + std::string(e.what()));
  }
  v.trie_ = BuildTrie(v.tokens_, v.base_size_);
  return v;
}

namespace {

std::string SerializeTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    out += t;
    out.push_back('\n');
  }
  return out;
}

}  // namespace

void Vocabulary::Save(const std::filesystem::path& vocab_path) const {
  WriteFileAtomic(vocab_path, SerializeTokens(tokens_));
}

std::string Vocabulary::ManifestJson() const {
  nlohmann::ordered_json m;
  m["base_size"] = base_size_;
  m["added"] = added();
  m["entity_token_ids"] = entity_ids_;
  return m.dump() + "\n";
}

void Vocabulary::SaveManifest(const std::filesystem::path& manifest_path) const {
  WriteFileAtomic(manifest_path, ManifestJson());
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorCode::kInvalidTokenId, std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::IsEntity(TokenId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < is_entity_.size() &&
         is_entity_[static_cast<std::size_t>(id)];
}

std::string Vocabulary::ContentHash() const { return Sha256Hex(SerializeTokens(tokens_)); }

Vocabulary ExtendVocab(const Vocabulary& vocab, const EntityLexicon& lexicon) {
  Vocabulary out = vocab;
  std::vector<TokenId> ids = vocab.entity_ids_;
  for (const auto& e : lexicon.entries()) {
    if (auto found = out.index_.find(e.surface); found != out.index_.end()) {
      ids.push_back(found->second);
      continue;
    }
    const auto id = static_cast<TokenId>(out.tokens_.size());
    out.tokens_.push_back(e.surface);
    out.index_.emplace(e.surface, id);
    ids.push_back(id);
  }
  out.SetEntityIds(std::move(ids));
  // base_size_ and the subword trie are shared with the input unchanged.
  return out;
}

namespace {

void EncodeChunk(const Vocabulary& vocab, std::string_view text, std::size_t begin,
                 std::size_t end, TokenSequence& out) {
  std::size_t i = begin;
  while (i < end) {
    while (i < end && IsSpace(text[i])) ++i;
    if (i >= end) break;
    std::size_t j = i;
    while (j < end && !IsSpace(text[j])) ++j;
    bool word_start = i == 0 || IsSpace(text[i - 1]);
    std::string_view word = text.substr(i, j - i);
    while (!word.empty()) {
      auto [id, len] = vocab.subwords().LongestPrefix(word);
      if (id < 0) {
        throw Error(ErrorCode::kUnencodableCharacter,
                    "byte 0x" + [&] {
                      std::ostringstream hex;
                      hex << std::hex << static_cast<int>(static_cast<unsigned char>(word[0]));
                      return hex.str();
                    }());
      }
      out.ids.push_back(id);
      out.word_starts.push_back(word_start);
      word_start = false;
      word.remove_prefix(len);
    }
    i = j;
  }
}

}  // namespace

TokenSequence Encode(const Vocabulary& vocab, const EntityLexicon* lexicon,
                     std::string_view text) {
  for (char c : text) {
    if (!IsPrintable(c) && c != '\t' && c != '\n' && c != '\r') {
      throw Error(ErrorCode::kUnencodableCharacter,
                  "non-printable byte " +
                      std::to_string(static_cast<int>(static_cast<unsigned char>(c))));
    }
  }
  TokenSequence out;
  std::size_t cursor = 0;
  if (lexicon != nullptr) {
    for (const auto& span : lexicon->FindEntities(text)) {
      auto id = vocab.Find(span.surface);
      if (!id) continue;
      EncodeChunk(vocab, text, cursor, span.start, out);
      out.ids.push_back(*id);
      out.word_starts.push_back(span.start == 0 || IsSpace(text[span.start - 1]));
      cursor = span.end;
    }
  }
  EncodeChunk(vocab, text, cursor, text.size(), out);
  return out;
}

std::string Decode(const Vocabulary& vocab, const TokenSequence& seq) {
  if (seq.word_starts.size() != seq.ids.size()) {
    throw Error(ErrorCode::kInvalidTokenId, "word_starts length does not match ids");
  }
  std::string out;
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    const TokenId id = seq.ids[i];
    const std::string& tok = vocab.token(id);
    std::string_view piece = tok;
    if (id == kMaskId) {
      piece = kMaskRendering;
    } else if (IsSpecialId(id)) {
      continue;
    }
    if (seq.word_starts[i] && !out.empty()) out.push_back(' ');
    out.append(piece);
  }
  return out;
}

}  // namespace radsum
