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

#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "radsum/entity_lexicon.hpp"
#include "radsum/error.hpp"
#include "test_support.hpp"

namespace radsum {
namespace {

using testing::TempDir;

std::filesystem::path WriteTerms(const TempDir& dir, const std::string& contents) {
  auto path = dir / "terms.tsv";
  std::ofstream(path) << contents;
  return path;
}

std::vector<std::string> Surfaces(const EntityLexicon& lex) {
  std::vector<std::string> out;
  for (const auto& e : lex.entries()) out.push_back(e.surface);
  return out;
}

TEST_CASE("load_lexicon deduplicates after normalization") {
  TempDir dir;
  std::vector<std::string> warnings;
  const auto lex = EntityLexicon::Load(
      WriteTerms(dir,
                 "# comment\nC0032285\tpneumonia\nC0032285\tPneumonia\n\n"
                 "C0008034\tchest pain\n"),
      LexiconLevel::kPhrase, &warnings);
  CHECK(lex.size() == 2);
  CHECK(Surfaces(lex) == std::vector<std::string>{"pneumonia", "chest pain"});
  CHECK(warnings.size() == 1);
}

TEST_CASE("load_lexicon keeps the first concept id and normalizes whitespace") {
  TempDir dir;
  const auto lex = EntityLexicon::Load(
      WriteTerms(dir, "C1\t  Pleural   EFFUSION \nC2\tpleural effusion\n"),
      LexiconLevel::kPhrase);
  REQUIRE(lex.size() == 1);
  CHECK(lex.entries()[0].surface == "pleural effusion");
  CHECK(lex.entries()[0].concept_id == "C1");
}

TEST_CASE("word-level lexicons reject multi-word rows") {
  TempDir dir;
  std::vector<std::string> warnings;
  const auto lex = EntityLexicon::Load(
      WriteTerms(dir, "C1\teosinophilic pneumonia\nC2\tatelectasis\n"), LexiconLevel::kWord,
      &warnings);
  CHECK(Surfaces(lex) == std::vector<std::string>{"atelectasis"});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("eosinophilic pneumonia") != std::string::npos);
}

TEST_CASE("load_lexicon errors") {
  TempDir dir;
  auto code = [&](const std::string& contents, LexiconLevel level) {
    try {
      EntityLexicon::Load(WriteTerms(dir, contents), level);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  CHECK(code("", LexiconLevel::kPhrase) == ErrorCode::kEmptyLexicon);
  CHECK(code("# only comments\n\n", LexiconLevel::kPhrase) == ErrorCode::kEmptyLexicon);
  CHECK(code("C1\tchest pain\n", LexiconLevel::kWord) == ErrorCode::kEmptyLexicon);
  CHECK(code("no tab here\n", LexiconLevel::kPhrase) == ErrorCode::kParseError);
  CHECK(code("C1\t\n", LexiconLevel::kPhrase) == ErrorCode::kParseError);
  CHECK(code("\tsurface\n", LexiconLevel::kPhrase) == ErrorCode::kParseError);
  CHECK(code("C1\ta\tb\n", LexiconLevel::kPhrase) == ErrorCode::kParseError);
  CHECK_THROWS_AS(EntityLexicon::Load(dir / "missing.tsv", LexiconLevel::kWord), Error);
}

TEST_CASE("derive_word_level") {
  const auto phrases = EntityLexicon::FromEntries(
      {{"C1", "eosinophilic pneumonia"}, {"C2", "tunneled central venous catheter"}},
      LexiconLevel::kPhrase);
  const auto words = phrases.DeriveWordLevel();
  CHECK(words.level() == LexiconLevel::kWord);
  CHECK(Surfaces(words) == std::vector<std::string>{"eosinophilic", "pneumonia", "tunneled",
                                                    "central", "venous", "catheter"});
  CHECK(words.entries()[1].concept_id == "C1");
  CHECK(words.entries()[5].concept_id == "C2");

  CHECK(Surfaces(EntityLexicon::FromEntries({{"C", "pneumonia"}}, LexiconLevel::kPhrase)
                     .DeriveWordLevel()) == std::vector<std::string>{"pneumonia"});
  const auto dedup =
      EntityLexicon::FromEntries({{"A", "chest pain"}, {"B", "pain chest"}}, LexiconLevel::kPhrase)
          .DeriveWordLevel();
  CHECK(Surfaces(dedup) == std::vector<std::string>{"chest", "pain"});
  CHECK(dedup.entries()[1].concept_id == "A");
}

TEST_CASE("find_entities leftmost-longest") {
  const auto lex = EntityLexicon::FromEntries(
      {{"C1", "pulmonary"}, {"C2", "pulmonary vascular congestion"}}, LexiconLevel::kPhrase);
  const auto spans = lex.FindEntities("mild pulmonary vascular congestion");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start == 5);
  CHECK(spans[0].end == 34);
  CHECK(spans[0].surface == "pulmonary vascular congestion");
  CHECK(spans[0].concept_id == "C2");

  // Falls back to the shorter entry when the long one does not complete.
  const auto partial = lex.FindEntities("pulmonary vascular bed");
  REQUIRE(partial.size() == 1);
  CHECK(partial[0].end == 9);
}

TEST_CASE("find_entities boundaries and case") {
  const auto rib = EntityLexicon::FromEntries({{"C", "rib"}}, LexiconLevel::kWord);
  CHECK(rib.FindEntities("describe the ribs").empty());
  CHECK(rib.FindEntities("the rib, again").size() == 1);
  CHECK(rib.FindEntities("(rib)").size() == 1);
  CHECK(rib.FindEntities("RIB").size() == 1);
  CHECK(rib.FindEntities("rib2").empty());

  const auto lex = testing::SamplePhraseLexicon();
  const auto spans = lex.FindEntities("Pleural  Effusion and PNEUMOTHORAX.");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].surface == "pleural effusion");
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 17);
  CHECK(spans[1].surface == "pneumothorax");

  CHECK(EntityLexicon{}.FindEntities("pneumonia").empty());
  CHECK(lex.FindEntities("").empty());
}

TEST_CASE("find_entities spans are sorted, disjoint and on boundaries") {
  const auto lex = testing::SamplePhraseLexicon();
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"lung",   "lungs", "pleural", "effusion", "lower",
                                          "lobe",   "pneumonia", "eosinophilic", "x", "-",
                                          "(",      ")",     "metastases", "pulmonary",
                                          "vascular", "congestion", ","};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    for (int i = 0; i < 12; ++i) {
      if (!text.empty() && rng() % 3 != 0) text.push_back(' ');
      text += words[pick(rng)];
    }
    const auto spans = lex.FindEntities(text);
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const auto& s = spans[k];
      CHECK(s.start < s.end);
      if (k > 0) CHECK(spans[k - 1].end <= s.start);
      CHECK((s.start == 0 || alnum(text[s.start - 1]) != alnum(text[s.start])));
      CHECK((s.end == text.size() || alnum(text[s.end - 1]) != alnum(text[s.end])));
      CHECK(NormalizeSurface(text.substr(s.start, s.end - s.start)) == s.surface);
    }
    // Locality: a prefix followed by " " and more text matches the same way
    // on the prefix when no span crosses the join.
    const std::string suffix = " " + words[pick(rng)] + " " + words[pick(rng)];
    const auto joined = lex.FindEntities(text + suffix);
    std::vector<EntitySpan> in_prefix;
    bool crosses = false;
    for (const auto& s : joined) {
      if (s.end <= text.size()) in_prefix.push_back(s);
      else if (s.start < text.size()) crosses = true;
    }
    if (!crosses) CHECK(in_prefix == spans);
  }
}

TEST_CASE("masked regions admit no further overlapping matches") {
  const auto lex = testing::SamplePhraseLexicon();
  const std::string text =
      "right lower lobe pneumonia with pleural effusion and pulmonary vascular congestion";
  std::string masked = text;
  for (const auto& s : lex.FindEntities(text)) {
    for (std::size_t i = s.start; i < s.end; ++i) masked[i] = '#';
  }
  for (const auto& s : lex.FindEntities(masked)) {
    for (std::size_t i = s.start; i < s.end; ++i) CHECK(masked[i] != '#');
  }
  CHECK(lex.FindEntities(masked).empty());
}

TEST_CASE("matcher work is independent of lexicon size") {
  std::vector<LexiconEntry> small{{"C", "pneumonia"}, {"C", "effusion"}};
  std::vector<LexiconEntry> large = small;
  for (int i = 0; i < 20000; ++i) large.push_back({"X", "term" + std::to_string(i)});
  const auto a = EntityLexicon::FromEntries(small, LexiconLevel::kPhrase);
  const auto b = EntityLexicon::FromEntries(large, LexiconLevel::kPhrase);
  std::string text;
  for (int i = 0; i < 2000; ++i) text += "pneumonia with small effusion ";
  MatchStats sa, sb;
  CHECK(a.FindEntities(text, &sa) == b.FindEntities(text, &sb));
  CHECK(sa.trie_steps == sb.trie_steps);
  CHECK(sb.trie_steps <= text.size() * (b.max_surface_length() + 1));
}

}  // namespace
}  // namespace radsum
