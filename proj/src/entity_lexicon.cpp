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

#include "radsum/entity_lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "radsum/error.hpp"
#include "radsum/file_util.hpp"
#include "radsum/hash.hpp"

namespace radsum {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }
char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool IsBoundary(std::string_view text, std::size_t pos) {
  if (pos == 0 || pos >= text.size()) return true;
  return IsAlnum(text[pos - 1]) != IsAlnum(text[pos]);
}

}  // namespace

std::string_view LexiconLevelName(LexiconLevel level) {
  return level == LexiconLevel::kWord ? "word" : "phrase";
}

LexiconLevel ParseLexiconLevel(std::string_view name) {
  if (name == "word") return LexiconLevel::kWord;
  if (name == "phrase") return LexiconLevel::kPhrase;
  throw Error(ErrorCode::kParseError, "unknown lexicon level '" + std::string(name) + "'");
}

std::string NormalizeSurface(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  bool pending_space = false;
  for (char c : surface) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(Lower(c));
  }
  return out;
}

EntityLexicon EntityLexicon::FromEntries(const std::vector<LexiconEntry>& entries,
                                         LexiconLevel level,
                                         std::vector<std::string>* warnings) {
  EntityLexicon lex;
  lex.level_ = level;
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  for (const auto& raw : entries) {
    std::string surface = NormalizeSurface(raw.surface);
    if (surface.empty()) {
      warn("blank surface for concept '" + raw.concept_id + "' dropped");
      continue;
    }
    if (level == LexiconLevel::kWord && surface.find(' ') != std::string::npos) {
      warn("multi-word surface '" + surface + "' rejected for word-level lexicon");
      continue;
    }
    if (auto it = lex.by_surface_.find(surface); it != lex.by_surface_.end()) {
      const auto& kept = lex.entries_[it->second];
      warn("duplicate surface '" + surface + "' (" + raw.concept_id +
           ") collapsed into " + kept.concept_id);
      continue;
    }
    lex.Add(LexiconEntry{raw.concept_id, std::move(surface)});
  }
  return lex;
}

EntityLexicon EntityLexicon::Load(const std::filesystem::path& path,
                                  LexiconLevel level,
                                  std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot read lexicon " + path.string());
  }
  std::vector<LexiconEntry> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = line;
    std::size_t first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (view[first] == '#') continue;
    std::size_t tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) +
                                              ": expected concept_id<TAB>surface");
    }
    std::string concept_id(view.substr(0, tab));
    std::string_view surface = view.substr(tab + 1);
    if (NormalizeSurface(concept_id).empty() || NormalizeSurface(surface).empty() ||
        surface.find('\t') != std::string_view::npos) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) +
                                              ": empty or extra column");
    }
    rows.push_back(LexiconEntry{std::move(concept_id), std::string(surface)});
  }
  EntityLexicon lex = FromEntries(rows, level, warnings);
  if (lex.empty()) {
    throw Error(ErrorCode::kEmptyLexicon, path.string() + " has no usable entries");
  }
  return lex;
}

EntityLexicon EntityLexicon::DeriveWordLevel() const {
  std::vector<LexiconEntry> words;
  for (const auto& e : entries_) {
    std::istringstream parts(e.surface);
    std::string word;
    while (parts >> word) words.push_back(LexiconEntry{e.concept_id, word});
  }
  // Repeated words are expected here, so duplicates are not reported.
  return FromEntries(words, LexiconLevel::kWord, nullptr);
}

void EntityLexicon::Add(LexiconEntry entry) {
  const std::size_t index = entries_.size();
  std::uint32_t node = 0;
  for (char c : entry.surface) {
    const auto key = (static_cast<std::uint64_t>(node) << 8) |
                     static_cast<unsigned char>(c);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
      const auto next = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(Node{});
      it = edges_.emplace(key, next).first;
    }
    node = it->second;
  }
  nodes_[node].entry = static_cast<std::int32_t>(index);
  max_surface_length_ = std::max(max_surface_length_, entry.surface.size());
  by_surface_.emplace(entry.surface, index);
  entries_.push_back(std::move(entry));
}

std::uint32_t EntityLexicon::Child(std::uint32_t node, unsigned char c) const {
  auto it = edges_.find((static_cast<std::uint64_t>(node) << 8) | c);
  return it == edges_.end() ? 0 : it->second;
}

std::vector<EntitySpan> EntityLexicon::FindEntities(std::string_view text,
                                                    MatchStats* stats) const {
  std::vector<EntitySpan> spans;
  if (entries_.empty()) return spans;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (IsSpace(text[i]) || !IsBoundary(text, i)) {
      ++i;
      continue;
    }
    if (stats) ++stats->start_positions;
    std::uint32_t node = 0;
    std::size_t j = i;
    std::int32_t best_entry = -1;
    std::size_t best_end = 0;
    while (j < n) {
      unsigned char c;
      std::size_t next = j + 1;
      if (IsSpace(text[j])) {
        c = ' ';
        while (next < n && IsSpace(text[next])) ++next;
      } else {
        c = static_cast<unsigned char>(Lower(text[j]));
      }
      std::uint32_t child = Child(node, c);
      if (stats) ++stats->trie_steps;
      if (child == 0) break;
      node = child;
      j = next;
      if (nodes_[node].entry >= 0 && IsBoundary(text, j)) {
        best_entry = nodes_[node].entry;
        best_end = j;
      }
    }
    if (best_entry < 0) {
      ++i;
      continue;
    }
    const auto& e = entries_[static_cast<std::size_t>(best_entry)];
    spans.push_back(EntitySpan{i, best_end, e.surface, e.concept_id});
    i = best_end;
  }
  return spans;
}

std::optional<std::size_t> EntityLexicon::IndexOf(std::string_view surface) const {
  auto it = by_surface_.find(std::string(surface));
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string Serialize(const std::vector<LexiconEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += e.concept_id;
    out.push_back('\t');
    out += e.surface;
    out.push_back('\n');
  }
  return out;
}

}  // namespace

void EntityLexicon::Save(const std::filesystem::path& path) const {
  WriteFileAtomic(path, Serialize(entries_));
}

std::string EntityLexicon::ContentHash() const {
  return Sha256Hex(std::string(LexiconLevelName(level_)) + "\n" + Serialize(entries_));
}

}  // namespace radsum
