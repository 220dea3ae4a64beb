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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radsum/commands.hpp"
#include "radsum/corpus_io.hpp"
#include "radsum/entity_lexicon.hpp"
#include "radsum/file_util.hpp"
#include "radsum/log.hpp"
#include "radsum/masker.hpp"
#include "radsum/metrics.hpp"
#include "radsum/report_parser.hpp"
#include "radsum/tokenizer.hpp"
#include "test_support.hpp"

namespace radsum {
namespace {

namespace fs = std::filesystem;

// Collects failed expectations for one criterion.
class Check {
 public:
  void operator()(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::string out;
    for (const auto& f : failures_) out += "\n    " + f;
    if (failed_ > failures_.size()) {
      out += "\n    ... " + std::to_string(failed_ - failures_.size()) + " more";
    }
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0;
};

struct Criterion {
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<void(Check&)> body;
};

std::size_t BruteLcs(const std::vector<int>& a, const std::vector<int>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
    if (bits <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      while (j < t.size() && t[j] != s[i]) ++j;
      if (j == t.size()) ok = false;
      else ++j;
    }
    if (ok) best = bits;
  }
  return best;
}

void LcsOracle(Check& check) {
  std::mt19937_64 rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> a(rng() % 13), b(rng() % 13);
    const int alphabet = 2 + trial % 6;
    for (int& x : a) x = static_cast<int>(rng() % alphabet);
    for (int& x : b) x = static_cast<int>(rng() % alphabet);
    check(LcsLength(a, b) == BruteLcs(a, b), "pair " + std::to_string(trial));
  }
}

void RougeExample(Check& check) {
  const auto s = RougeL("the cat sat", "the cat");
  // LCS = 2, m = 3, n = 2.
  check(s.recall == 2.0 / 3.0, "recall");
  check(s.precision == 1.0, "precision");
  const double f1 = 2 * (2.0 / 3.0) * 1.0 / (2.0 / 3.0 + 1.0);
  check(s.f1 == f1 && std::abs(s.f1 - 0.8) < 1e-15, "f1");
}

void PerplexityChecks(Check& check) {
  check(Perplexity(std::vector<double>(5, 0.0)) == 1.0, "probability 1");
  check(std::abs(Perplexity(std::vector<double>(5, -1.0)) - 2.0) < 1e-15, "probability 1/2");
  check(std::abs(Perplexity(std::vector<double>{std::log2(0.5), std::log2(0.125)}) - 4.0) <
            1e-15,
        "{1/2, 1/8}");
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> p(1e-9, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> logs(1 + rng() % 100);
    for (double& v : logs) v = std::log2(p(rng));
    const double ppl = Perplexity(logs);
    check(std::abs(std::exp2(MeanCrossEntropy(logs)) - ppl) <= 1e-12 * ppl,
          "relation " + std::to_string(trial));
  }
}

void VocabArithmetic(Check& check) {
  std::vector<std::string> subwords;
  for (int i = 0; 99 + i < 50265; ++i) subwords.push_back("w" + std::to_string(i));
  const auto base = Vocabulary::MakeBase(subwords);
  check(base.size() == 50265, "base size " + std::to_string(base.size()));

  std::vector<LexiconEntry> words, phrases;
  for (int i = 0; i < 4950; ++i) words.push_back({"W", "entityword" + std::to_string(i)});
  for (int i = 0; i < 14483; ++i) phrases.push_back({"P", "entity phrase" + std::to_string(i)});
  const auto word_lex = EntityLexicon::FromEntries(words, LexiconLevel::kWord);
  const auto phrase_lex = EntityLexicon::FromEntries(phrases, LexiconLevel::kPhrase);
  check(word_lex.size() == 4950, "word entries");
  check(phrase_lex.size() == 14483, "phrase entries");
  const auto wv = ExtendVocab(base, word_lex);
  const auto pv = ExtendVocab(base, phrase_lex);
  check(wv.size() == 55215, "word-extended size " + std::to_string(wv.size()));
  check(pv.size() == 64748, "phrase-extended size " + std::to_string(pv.size()));
}

// Records of report length where roughly half the words are lexicon entries.
std::vector<TextRecord> EntityRichRecords(std::size_t n, std::uint64_t seed,
                                          std::size_t min_words = 20) {
  const auto lex = testing::SamplePhraseLexicon();
  const auto words = testing::CommonSubwords();
  std::mt19937_64 rng(seed);
  std::vector<TextRecord> out;
  for (std::size_t r = 0; r < n; ++r) {
    std::string text;
    const std::size_t len = min_words + rng() % 40;
    for (std::size_t w = 0; w < len; ++w) {
      if (!text.empty()) text += ' ';
      text += rng() % 2 ? lex.entries()[rng() % lex.size()].surface : words[rng() % words.size()];
    }
    out.push_back({"rec" + std::to_string(r), text});
  }
  return out;
}

std::string Serialize(const MlmCorpus& corpus) {
  std::vector<Json> lines;
  for (const auto& ex : corpus.examples) lines.push_back(MaskedExampleJson(ex));
  return DumpJsonl(lines) + corpus.manifest.ToJson();
}

void MaskingStatistics(Check& check) {
  const auto vocab = Vocabulary::MakeBase(testing::CommonSubwords());
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<TokenId> id(kNumSpecialTokens,
                                            static_cast<TokenId>(vocab.size()) - 1);
  const auto strategy = MaskingStrategy::For(MaskingKind::kRandom, 42);
  std::size_t total = 0, selected = 0;
  std::size_t branch[3] = {0, 0, 0};
  for (int r = 0; r < 1000; ++r) {
    TokenSequence seq;
    for (int i = 0; i < 100; ++i) {
      seq.ids.push_back(id(rng));
      seq.word_starts.push_back(true);
    }
    const auto ex = ApplyRandomMasking(seq, vocab, strategy, "r" + std::to_string(r));
    total += seq.size();
    selected += ex.mask_positions.size();
    for (auto b : ex.branches) ++branch[static_cast<int>(b)];
  }
  const double rate = static_cast<double>(selected) / static_cast<double>(total);
  check(total == 100000, "corpus size");
  check(rate >= 0.14 && rate <= 0.16, "mask rate " + std::to_string(rate));
  const double n = static_cast<double>(selected);
  check(std::abs(branch[0] / n - 0.8) <= 0.02, "mask branch " + std::to_string(branch[0] / n));
  check(std::abs(branch[1] / n - 0.1) <= 0.02, "random branch " + std::to_string(branch[1] / n));
  check(std::abs(branch[2] / n - 0.1) <= 0.02, "keep branch " + std::to_string(branch[2] / n));

  const auto lex = testing::SamplePhraseLexicon();
  const auto ext = ExtendVocab(vocab, lex);
  const auto records = EntityRichRecords(1000, 1003, 150);
  for (double p : {0.0, 0.5, 1.0}) {
    auto s = MaskingStrategy::For(MaskingKind::kEntityPhrase, 7);
    s.entity_fraction = p;
    const auto corpus = GenerateMlmCorpus(records, ext, &lex, s);
    const double share = corpus.manifest.realized_entity_share();
    check(std::abs(share - p) <= 0.03,
          "entity share " + std::to_string(share) + " for p=" + std::to_string(p));
    const auto again = GenerateMlmCorpus(records, ext, &lex, s, 4);
    check(Serialize(corpus) == Serialize(again), "rerun bytes for p=" + std::to_string(p));
  }
  const auto r1 = GenerateMlmCorpus(records, ext, nullptr, strategy);
  const auto r2 = GenerateMlmCorpus(records, ext, nullptr, strategy, 3);
  check(Serialize(r1) == Serialize(r2), "random strategy rerun bytes");
}

void Reconstruction(Check& check) {
  const auto phrases = testing::SamplePhraseLexicon();
  const auto words = phrases.DeriveWordLevel();
  const auto base = Vocabulary::MakeBase(testing::CommonSubwords());
  const auto phrase_vocab = ExtendVocab(base, phrases);
  const auto word_vocab = ExtendVocab(base, words);
  const auto records = EntityRichRecords(10000, 1004);

  struct Run {
    MaskingKind kind;
    const Vocabulary* vocab;
    const EntityLexicon* lexicon;
  };
  for (const Run& run : {Run{MaskingKind::kRandom, &base, nullptr},
                         Run{MaskingKind::kEntityWord, &word_vocab, &words},
                         Run{MaskingKind::kEntityPhrase, &phrase_vocab, &phrases}}) {
    auto strategy = MaskingStrategy::For(run.kind, 5);
    strategy.entity_fraction = 0.7;
    const auto corpus = GenerateMlmCorpus(records, *run.vocab, run.lexicon, strategy);
    check(corpus.examples.size() == records.size(), "example count");
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto want = Encode(*run.vocab, run.lexicon, records[i].text).ids;
      check(corpus.examples[i].Restore() == want,
            std::string(MaskingKindName(run.kind)) + " record " + records[i].id);
    }
  }
}

void TokenizerRoundTrip(Check& check) {
  const auto lex = testing::SamplePhraseLexicon();
  const auto base = Vocabulary::MakeBase(testing::CommonSubwords());
  const auto ext = ExtendVocab(base, lex);
  std::mt19937_64 rng(1005);
  for (int trial = 0; trial < 10000; ++trial) {
    std::string s = testing::RandomPrintable(rng, 12);
    if (trial % 3 == 0) {
      s += (s.empty() ? "" : " ") + lex.entries()[rng() % lex.size()].surface;
    }
    check(Decode(base, Encode(base, nullptr, s)) == s, "plain: " + s);
    check(Decode(ext, Encode(ext, &lex, s)) == s, "extended: " + s);
  }
  const auto words = testing::CommonSubwords();
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    for (int w = 0; w < 10; ++w) {
      if (!s.empty()) s += ' ';
      s += rng() % 3 == 0 ? lex.entries()[rng() % lex.size()].surface : words[rng() % words.size()];
    }
    const auto spans = lex.FindEntities(s);
    const auto seq = Encode(ext, &lex, s);
    std::size_t entity_tokens = 0;
    for (TokenId id : seq.ids) entity_tokens += ext.IsEntity(id);
    bool each_found = true;
    for (const auto& span : spans) {
      const auto id = ext.Find(span.surface);
      each_found = each_found && id && ext.IsEntity(*id) &&
                   std::find(seq.ids.begin(), seq.ids.end(), *id) != seq.ids.end();
    }
    check(entity_tokens == spans.size() && each_found, "precision: " + s);
  }
}

void SectionsAndSplits(Check& check) {
  const auto report = DetectSections(RawReport{"t1", std::string(testing::kSampleReport)});
  check(report.sections.size() == 3, "section count");
  const auto* bg = report.Find("BACKGROUND");
  const auto* fi = report.Find("FINDINGS");
  const auto* im = report.Find("IMPRESSION");
  check(bg && bg->body == "History of lung cancer.", "background body");
  check(fi && CleanText(fi->body) == testing::kSampleFindings, "findings body");
  check(im && im->body == testing::kSampleImpression, "impression body");

  std::vector<Json> corpus;
  for (int i = 0; i < 300; ++i) {
    corpus.push_back(RetrainJson("r" + std::to_string(i),
                                 "synthetic report " + std::to_string(i) + " findings"));
  }
  const auto result = SplitDataset(corpus, SplitSpec::Parse("train=200,val=50,test=50", 11));
  std::vector<NamedSplit> named;
  for (std::size_t i = 0; i < result.splits.size(); ++i) {
    named.emplace_back(result.manifest.splits[i].name, result.splits[i]);
  }
  const auto clean = VerifyDisjoint(named);
  check(clean.id_collisions.size() + clean.text_collisions.size() == 0, "generated splits");

  Json planted = named[0].second[17];
  planted["id"] = "planted";
  named[2].second.push_back(planted);
  const auto dirty = VerifyDisjoint(named);
  check(dirty.id_collisions.size() + dirty.text_collisions.size() == 1,
        "planted duplicate: " + std::to_string(dirty.text_collisions.size()));
}

void EndToEnd(Check& check) {
  testing::TempDir dir;
  std::vector<Json> raw;
  raw.push_back(RawReportJson({"t1", std::string(testing::kSampleReport)}));
  raw.push_back(RawReportJson({"b1", std::string(testing::kBannerReport)}));
  for (const auto& r : EntityRichRecords(200, 1006)) {
    raw.push_back(RawReportJson({r.id, "FINDINGS: " + r.text + ".\nIMPRESSION: " + r.text}));
  }
  WriteJsonl(dir / "reports.jsonl", raw);
  std::string tsv;
  const auto lexicon = testing::SamplePhraseLexicon();
  for (const auto& e : lexicon.entries()) {
    tsv += e.concept_id + "\t" + e.surface + "\n";
  }
  WriteFileAtomic(dir / "terms.tsv", tsv);
  Vocabulary::MakeBase(testing::CommonSubwords()).Save(dir / "base.vocab");

  std::ostringstream sink;
  check(cli::RunVocabExtend({dir / "base.vocab", std::nullopt, dir / "terms.tsv", "phrase",
                             dir / "ext.vocab", std::nullopt},
                            sink) == cli::kExitOk,
        "vocab-extend");
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const auto sub = dir / ("run" + std::to_string(run));
    fs::create_directories(sub);
    check(cli::RunParse({dir / "reports.jsonl", sub / "retrain.jsonl", "retrain", true}) ==
              cli::kExitOk,
          "parse");
    for (const char* strategy : {"random", "entity-phrase"}) {
      cli::MaskOptions m;
      m.in = sub / "retrain.jsonl";
      m.vocab = dir / "ext.vocab";
      m.strategy = strategy;
      if (m.strategy != "random") m.lexicon = dir / "terms.tsv";
      m.seed = 123;
      m.workers = run == 0 ? 1 : 3;
      m.out = sub / (std::string(strategy) + ".jsonl");
      check(cli::RunMask(m, sink) == cli::kExitOk, std::string("mask ") + strategy);
    }
    std::string bytes;
    for (const char* name : {"retrain.jsonl", "retrain.jsonl.manifest.json", "random.jsonl",
                             "random.jsonl.manifest.json", "entity-phrase.jsonl",
                             "entity-phrase.jsonl.manifest.json"}) {
      bytes += ReadFile(sub / name);
    }
    if (run == 0) first = bytes;
    else check(bytes == first && !bytes.empty(), "byte-identical rerun");
  }
}

}  // namespace
}  // namespace radsum

int main() {
  using radsum::Check;
  radsum::SetLogLevel(radsum::LogLevel::kError);
  const std::vector<radsum::Criterion> criteria = {
      {"rouge-l oracle equivalence (1,000 pairs)", 10.0, radsum::LcsOracle},
      {"rouge-l worked example R=2/3 P=1 F1=0.8", 0.0, radsum::RougeExample},
      {"perplexity checks and 2^CE relation", 1.0, radsum::PerplexityChecks},
      {"vocabulary arithmetic 50,265 -> 55,215 / 64,748", 5.0, radsum::VocabArithmetic},
      {"masking statistics and determinism", 30.0, radsum::MaskingStatistics},
      {"reconstruction invariant (10,000 records)", 0.0, radsum::Reconstruction},
      {"tokenizer round trip and entity precision", 0.0, radsum::TokenizerRoundTrip},
      {"sample report sections and split disjointness", 0.0, radsum::SectionsAndSplits},
      {"end-to-end parse and mask determinism", 0.0, radsum::EndToEnd},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body(check);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s == 0.0 || secs < c.time_limit_s;
    const bool ok = check.ok() && error.empty() && in_time;
    failed += !ok;
    std::printf("%s  %-50s %8.3f s", ok ? "PASS" : "FAIL", c.name.c_str(), secs);
    if (c.time_limit_s > 0.0) std::printf(" (limit %.0f s)", c.time_limit_s);
    std::printf("%s", check.Summary().c_str());
    if (!error.empty()) std::printf("\n    exception: %s", error.c_str());
    std::printf("\n");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
