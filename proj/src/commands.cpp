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

#include "radsum/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "radsum/corpus_io.hpp"
#include "radsum/entity_lexicon.hpp"
#include "radsum/file_util.hpp"
#include "radsum/hash.hpp"
#include "radsum/log.hpp"
#include "radsum/masker.hpp"
#include "radsum/metrics.hpp"
#include "radsum/report_parser.hpp"
#include "radsum/tokenizer.hpp"

namespace radsum::cli {
namespace fs = std::filesystem;

int ExitStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigMismatch:
    case ErrorCode::kInvalidStrategy:
    case ErrorCode::kUnmatchedIds:
    case ErrorCode::kPositionMismatch:
    case ErrorCode::kInvalidSplitSpec:
    case ErrorCode::kInsufficientRecords:
    case ErrorCode::kDuplicateId:
      return kExitValidationError;
    default:
      return kExitInputError;
  }
}

namespace {

int Guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    LogError(e.what());
    return ExitStatusFor(e.code());
  } catch (const std::exception& e) {
    LogError(e.what());
    return kExitInputError;
  }
}

fs::path WithSuffix(const fs::path& p, std::string_view suffix) {
  fs::path out = p;
  out += std::string(suffix);
  return out;
}

std::vector<RawReport> LoadReports(const fs::path& in) {
  std::error_code ec;
  std::vector<RawReport> reports;
  if (fs::is_directory(in, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().filename().string().starts_with(".")) continue;
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) reports.push_back(RawReport{f.stem().string(), ReadFile(f)});
    return reports;
  }
  if (in.extension() == ".jsonl") {
    std::set<std::string> ids;
    for (const Json& j : ReadJsonl(in)) {
      RawReport r = RawReportFromJson(j);
      if (!ids.insert(r.id).second) {
        throw Error(ErrorCode::kDuplicateId, "id '" + r.id + "' repeated in " + in.string());
      }
      reports.push_back(std::move(r));
    }
    return reports;
  }
  reports.push_back(RawReport{in.stem().string(), ReadFile(in)});
  return reports;
}

std::vector<TextRecord> LoadTextRecords(const fs::path& in) {
  std::vector<TextRecord> records;
  for (const Json& j : ReadJsonl(in)) {
    records.push_back(TextRecord{StringField(j, "id"), StringField(j, "text")});
  }
  return records;
}

Vocabulary LoadVocab(const fs::path& vocab, const std::optional<fs::path>& manifest) {
  if (manifest) return Vocabulary::Load(vocab, manifest);
  fs::path implied = WithSuffix(vocab, ".manifest.json");
  std::error_code ec;
  if (fs::exists(implied, ec)) return Vocabulary::Load(vocab, implied);
  return Vocabulary::Load(vocab);
}

void LogWarnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) LogWarn(w);
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

// ---- parse ---------------------------------------------------------------

int RunParse(const ParseOptions& opts) {
  return Guarded([&] {
    if (opts.mode != "retrain" && opts.mode != "finetune" && opts.mode != "sections") {
      throw Error(ErrorCode::kInvalidStrategy, "mode must be retrain, finetune or sections");
    }
    const std::vector<RawReport> reports = LoadReports(opts.in);
    std::vector<Json> out;
    std::map<std::string, std::size_t> skip_reasons;
    std::size_t skipped = 0;
    for (const auto& report : reports) {
      try {
        SectionedReport sectioned = DetectSections(report);
        if (opts.mode == "sections") {
          out.push_back(SectionedJson(sectioned));
        } else if (opts.mode == "retrain") {
          out.push_back(RetrainJson(report.id, MakeRetrainText(sectioned)));
        } else {
          out.push_back(PairJson(MakeSummPair(sectioned, opts.include_background)));
        }
      } catch (const Error& e) {
        LogWarn("skipping '" + report.id + "': " + e.what());
        ++skip_reasons[std::string(ErrorCodeName(e.code()))];
        ++skipped;
      }
    }
    WriteJsonl(opts.out, out);

    Json manifest;
    manifest["mode"] = opts.mode;
    manifest["include_background"] = opts.include_background;
    manifest["records"] = reports.size();
    manifest["written"] = out.size();
    manifest["skipped"] = skipped;
    manifest["skip_reasons"] = Json::object();
    for (const auto& [code, n] : skip_reasons) manifest["skip_reasons"][code] = n;
    if (opts.mode == "finetune") {
      manifest["generation"] = {{"beam_size", kRecommendedBeamSize},
                                {"no_repeat_ngram_size", kRecommendedNoRepeatNgram}};
    }
    WriteFileAtomic(WithSuffix(opts.out, ".manifest.json"), manifest.dump() + "\n");
    LogInfo("parse: " + std::to_string(out.size()) + " written, " + std::to_string(skipped) +
            " skipped");
    return skipped > 0 ? kExitPartial : kExitOk;
  });
}

// ---- lexicon / annotate / vocab-extend -----------------------------------

int RunLexicon(const LexiconOptions& opts, std::ostream& report) {
  return Guarded([&] {
    std::vector<std::string> warnings;
    EntityLexicon lex = EntityLexicon::Load(opts.in, ParseLexiconLevel(opts.level), &warnings);
    LogWarnings(warnings);
    if (opts.derive_word) lex = lex.DeriveWordLevel();
    lex.Save(opts.out);
    report << "entries\t" << lex.size() << "\nlevel\t" << LexiconLevelName(lex.level())
           << "\nsha256\t" << lex.ContentHash() << "\n";
    return kExitOk;
  });
}

int RunAnnotate(const AnnotateOptions& opts) {
  return Guarded([&] {
    std::vector<std::string> warnings;
    const EntityLexicon lex =
        EntityLexicon::Load(opts.lexicon, ParseLexiconLevel(opts.level), &warnings);
    LogWarnings(warnings);
    std::vector<Json> out;
    for (const auto& rec : LoadTextRecords(opts.in)) {
      Json entities = Json::array();
      for (const auto& span : lex.FindEntities(rec.text)) {
        Json e;
        e["start"] = span.start;
        e["end"] = span.end;
        e["surface"] = span.surface;
        e["concept_id"] = span.concept_id;
        entities.push_back(std::move(e));
      }
      Json j;
      j["id"] = rec.id;
      j["entities"] = std::move(entities);
      out.push_back(std::move(j));
    }
    WriteJsonl(opts.out, out);
    return kExitOk;
  });
}

int RunVocabExtend(const VocabExtendOptions& opts, std::ostream& report) {
  return Guarded([&] {
    const Vocabulary base = LoadVocab(opts.vocab, opts.vocab_manifest);
    std::vector<std::string> warnings;
    const EntityLexicon lex =
        EntityLexicon::Load(opts.lexicon, ParseLexiconLevel(opts.level), &warnings);
    LogWarnings(warnings);
    const Vocabulary extended = ExtendVocab(base, lex);
    extended.Save(opts.out);
    extended.SaveManifest(opts.manifest.value_or(WithSuffix(opts.out, ".manifest.json")));
    report << "base_size\t" << base.size() << "\nentities\t" << lex.size()
           << "\nextended_size\t" << extended.size() << "\n";
    return kExitOk;
  });
}

// ---- mask / ablate -------------------------------------------------------

namespace {

struct MaskInputs {
  std::vector<TextRecord> records;
  Vocabulary vocab;
  std::optional<EntityLexicon> lexicon;
};

MaskingStrategy StrategyFrom(const MaskOptions& opts) {
  MaskingStrategy s = MaskingStrategy::For(ParseMaskingKind(opts.strategy), opts.seed);
  s.mask_rate = opts.mask_rate;
  s.entity_fraction = opts.entity_fraction;
  if (opts.corruption) s.corruption = ParseCorruption(*opts.corruption);
  s.Validate();
  return s;
}

MaskInputs LoadMaskInputs(const MaskOptions& opts, MaskingKind kind) {
  MaskInputs in{LoadTextRecords(opts.in), LoadVocab(opts.vocab, opts.vocab_manifest), {}};
  if (opts.lexicon) {
    LexiconLevel level = LexiconLevel::kPhrase;
    if (kind == MaskingKind::kEntityWord) level = LexiconLevel::kWord;
    if (opts.level) level = ParseLexiconLevel(*opts.level);
    std::vector<std::string> warnings;
    in.lexicon = EntityLexicon::Load(*opts.lexicon, level, &warnings);
    LogWarnings(warnings);
  }
  return in;
}

void WriteCorpus(const MlmCorpus& corpus, const fs::path& out, const fs::path& manifest) {
  std::string body;
  for (const auto& ex : corpus.examples) {
    body += MaskedExampleJson(ex).dump();
    body.push_back('\n');
  }
  WriteFileAtomic(out, body);
  WriteFileAtomic(manifest, corpus.manifest.ToJson());
}

}  // namespace

int RunMask(const MaskOptions& opts, std::ostream& report) {
  return Guarded([&] {
    const MaskingStrategy strategy = StrategyFrom(opts);
    const MaskInputs in = LoadMaskInputs(opts, strategy.kind);
    const MlmCorpus corpus = GenerateMlmCorpus(
        in.records, in.vocab, in.lexicon ? &*in.lexicon : nullptr, strategy, opts.workers);
    WriteCorpus(corpus, opts.out, opts.manifest.value_or(WithSuffix(opts.out, ".manifest.json")));
    const MaskingManifest& m = corpus.manifest;
    report << "records\t" << m.records << "\ndropped\t" << m.dropped << "\nrealized_mask_rate\t"
           << Fixed(m.realized_mask_rate()) << "\nrealized_entity_share\t"
           << Fixed(m.realized_entity_share()) << "\nbranches\tmask=" << m.branch_mask
           << " random=" << m.branch_random << " keep=" << m.branch_keep << "\n";
    return m.dropped > 0 ? kExitPartial : kExitOk;
  });
}

std::string FormatFraction(double fraction) { return Json(fraction).dump(); }

std::uint64_t AblationSeed(std::uint64_t base_seed, double fraction) {
  return Mix64(base_seed ^ Fnv1a64(FormatFraction(fraction)));
}

int RunAblate(const AblateOptions& opts, std::ostream& report) {
  return Guarded([&] {
    if (opts.fractions.empty()) {
      throw Error(ErrorCode::kInvalidStrategy, "no fractions given");
    }
    std::set<double> distinct;
    for (double f : opts.fractions) {
      if (!(f >= 0.0 && f <= 1.0)) {
        throw Error(ErrorCode::kInvalidStrategy,
                    "fraction " + FormatFraction(f) + " outside [0, 1]");
      }
      if (!distinct.insert(f).second) {
        throw Error(ErrorCode::kInvalidStrategy, "duplicate fraction " + FormatFraction(f));
      }
    }
    MaskOptions first = opts.base;
    first.entity_fraction = opts.fractions.front();
    const MaskingStrategy probe = StrategyFrom(first);
    if (probe.kind == MaskingKind::kRandom) {
      throw Error(ErrorCode::kInvalidStrategy, "ablation needs an entity strategy");
    }
    const MaskInputs in = LoadMaskInputs(opts.base, probe.kind);

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + opts.out_dir.string());

    Json runs = Json::array();
    bool partial = false;
    report << "entity_fraction\tseed\trecords\trealized_mask_rate\trealized_entity_share\n";
    for (double f : opts.fractions) {
      MaskOptions run = opts.base;
      run.entity_fraction = f;
      run.seed = AblationSeed(opts.base.seed, f);
      const MaskingStrategy strategy = StrategyFrom(run);
      const MlmCorpus corpus = GenerateMlmCorpus(
          in.records, in.vocab, in.lexicon ? &*in.lexicon : nullptr, strategy, run.workers);
      const std::string stem = "mlm_ef" + FormatFraction(f);
      WriteCorpus(corpus, opts.out_dir / (stem + ".jsonl"),
                  opts.out_dir / (stem + ".manifest.json"));
      partial = partial || corpus.manifest.dropped > 0;
      Json r;
      r["entity_fraction"] = f;
      r["seed"] = run.seed;
      r["corpus"] = stem + ".jsonl";
      r["manifest"] = stem + ".manifest.json";
      r["records"] = corpus.manifest.records;
      r["realized_mask_rate"] = corpus.manifest.realized_mask_rate();
      r["realized_entity_share"] = corpus.manifest.realized_entity_share();
      runs.push_back(std::move(r));
      report << FormatFraction(f) << '\t' << run.seed << '\t' << corpus.manifest.records << '\t'
             << Fixed(corpus.manifest.realized_mask_rate()) << '\t'
             << Fixed(corpus.manifest.realized_entity_share()) << '\n';
    }
    Json summary;
    summary["seed"] = opts.base.seed;
    summary["strategy"] = MaskingKindName(probe.kind);
    summary["mask_rate"] = probe.mask_rate;
    summary["corruption"] = CorruptionName(probe.corruption);
    summary["vocab_hash"] = in.vocab.ContentHash();
    summary["runs"] = std::move(runs);
    WriteFileAtomic(opts.out_dir / "ablation.json", summary.dump() + "\n");
    return partial ? kExitPartial : kExitOk;
  });
}

// ---- split / verify ------------------------------------------------------

int RunSplit(const SplitOptions& opts, std::ostream& report) {
  return Guarded([&] {
    const SplitSpec spec = SplitSpec::Parse(opts.splits, opts.seed);
    const SplitResult result = SplitDataset(ReadJsonl(opts.in), spec);
    WriteSplits(result, opts.out_dir);
    for (const auto& s : result.manifest.splits) {
      report << s.name << '\t' << s.count << '\t' << s.sha256 << '\n';
    }
    if (result.manifest.near_duplicates_dropped > 0) {
      LogWarn(std::to_string(result.manifest.near_duplicates_dropped) +
              " near-duplicate records dropped before splitting");
    }
    return kExitOk;
  });
}

int RunVerify(const VerifyOptions& opts, std::ostream& report) {
  return Guarded([&] {
    if (opts.files.size() < 2) {
      throw Error(ErrorCode::kInvalidSplitSpec, "verification needs at least two split files");
    }
    const CollisionReport r = VerifyDisjointFiles(opts.files);
    report << "id_collisions\t" << r.id_collisions.size() << "\ntext_collisions\t"
           << r.text_collisions.size() << "\n";
    for (const auto& c : r.id_collisions) {
      report << "id\t" << c.key << '\t' << c.split_a << '\t' << c.split_b << '\n';
    }
    for (const auto& c : r.text_collisions) {
      report << "text\t" << c.key.substr(0, 16) << '\t' << c.split_a << ':' << c.id_a << '\t'
             << c.split_b << ':' << c.id_b << '\n';
    }
    return r.clean() ? kExitOk : kExitValidationError;
  });
}

// ---- eval ----------------------------------------------------------------

namespace {

std::string PickField(const Json& j, const std::optional<std::string>& field,
                      std::initializer_list<std::string_view> fallbacks) {
  if (field) return StringField(j, *field);
  for (std::string_view f : fallbacks) {
    auto it = j.find(std::string(f));
    if (it != j.end() && it->is_string()) return it->get<std::string>();
  }
  throw Error(ErrorCode::kSchemaMismatch, "record has none of the expected text fields");
}

// Matches records of two files by id; throws kUnmatchedIds listing up to 10.
template <typename A, typename B>
void CheckPairing(const std::map<std::string, A>& left, const std::map<std::string, B>& right) {
  std::vector<std::string> missing;
  for (const auto& [id, v] : left) {
    if (!right.count(id)) missing.push_back(id);
  }
  for (const auto& [id, v] : right) {
    if (!left.count(id)) missing.push_back(id);
  }
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
    if (i) list += ", ";
    list += missing[i];
  }
  throw Error(ErrorCode::kUnmatchedIds,
              std::to_string(missing.size()) + " ids without a partner: " + list);
}

template <typename T>
std::map<std::string, T> IndexById(const std::vector<Json>& records,
                                   const std::function<T(const Json&)>& get) {
  std::map<std::string, T> out;
  for (const Json& j : records) {
    std::string id = StringField(j, "id");
    if (out.count(id)) throw Error(ErrorCode::kDuplicateId, "id '" + id + "' repeated");
    out.emplace(std::move(id), get(j));
  }
  return out;
}

const fs::path& Required(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw Error(ErrorCode::kInvalidStrategy, std::string("missing --") + flag);
  return *p;
}

int EvalRouge(const EvalOptions& opts, std::ostream& table) {
  struct Hyp {
    std::string text;
    std::optional<double> external;
  };
  const auto refs = IndexById<std::string>(
      ReadJsonl(Required(opts.ref, "ref")),
      [&](const Json& j) { return PickField(j, opts.ref_field, {"target", "text"}); });
  const auto hyps = IndexById<Hyp>(ReadJsonl(Required(opts.hyp, "hyp")), [&](const Json& j) {
    Hyp h{PickField(j, opts.hyp_field, {"summary", "prediction", "target", "text"}), {}};
    if (auto it = j.find("external_score"); it != j.end() && it->is_number()) {
      h.external = it->get<double>();
    }
    return h;
  });
  CheckPairing(refs, hyps);

  std::vector<RougeRecord> records;
  std::size_t skipped = 0;
  for (const auto& [id, ref] : refs) {
    const Hyp& h = hyps.at(id);
    try {
      records.push_back(RougeRecord{id, RougeL(ref, h.text), h.external});
    } catch (const Error& e) {
      LogWarn("skipping '" + id + "': " + e.what());
      ++skipped;
    }
  }
  const RougeReport report = AggregateRouge(std::move(records));
  std::vector<Json> out;
  for (const auto& r : report.records) {
    Json j;
    j["id"] = r.id;
    j["recall"] = r.score.recall;
    j["precision"] = r.score.precision;
    j["f1"] = r.score.f1;
    if (r.external) j["external_score"] = *r.external;
    out.push_back(std::move(j));
  }
  Json agg;
  agg["id"] = "__aggregate__";
  agg["records"] = report.records.size();
  agg["recall"] = report.mean.recall;
  agg["precision"] = report.mean.precision;
  agg["f1"] = report.mean.f1;
  if (report.external_mean) agg["external_score"] = *report.external_mean;
  out.push_back(std::move(agg));
  WriteJsonl(opts.out, out);

  table << "metric      value\n"
        << "records     " << report.records.size() << "\n"
        << "ROUGE-L R   " << Fixed(report.mean.recall) << "\n"
        << "ROUGE-L P   " << Fixed(report.mean.precision) << "\n"
        << "ROUGE-L F1  " << Fixed(report.mean.f1) << "\n";
  if (report.external_mean) table << "external    " << Fixed(*report.external_mean) << "\n";
  return skipped > 0 ? kExitPartial : kExitOk;
}

int EvalPerplexity(const EvalOptions& opts, std::ostream& table) {
  std::vector<PerplexityRecord> records;
  std::set<std::string> ids;
  for (const Json& j : ReadJsonl(Required(opts.logprobs, "logprobs"))) {
    PerplexityRecord rec;
    rec.id = StringField(j, "id");
    if (!ids.insert(rec.id).second) {
      throw Error(ErrorCode::kDuplicateId, "id '" + rec.id + "' repeated");
    }
    std::vector<double> logs;
    LogBase base = LogBase::kTwo;
    try {
      logs = j.at("logprobs").get<std::vector<double>>();
      if (j.contains("base")) base = ParseLogBase(j.at("base").get<std::string>());
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, "record '" + rec.id + "': " + e.what());
    }
    const auto log2 = ToLog2(logs, base);
    rec.tokens = log2.size();
    rec.cross_entropy = MeanCrossEntropy(log2);
    rec.perplexity = std::exp2(rec.cross_entropy);
    records.push_back(std::move(rec));
  }
  const PerplexityReport report = AggregatePerplexity(std::move(records));
  std::vector<Json> out;
  for (const auto& r : report.records) {
    Json j;
    j["id"] = r.id;
    j["tokens"] = r.tokens;
    j["cross_entropy_bits"] = r.cross_entropy;
    j["ppl"] = r.perplexity;
    out.push_back(std::move(j));
  }
  Json agg;
  agg["id"] = "__aggregate__";
  agg["records"] = report.records.size();
  agg["tokens"] = report.tokens;
  agg["cross_entropy_bits"] = report.cross_entropy;
  agg["ppl"] = report.perplexity;
  out.push_back(std::move(agg));
  WriteJsonl(opts.out, out);

  table << "metric          value\n"
        << "records         " << report.records.size() << "\n"
        << "tokens          " << report.tokens << "\n"
        << "loss (bits)     " << Fixed(report.cross_entropy) << "\n"
        << "PPL             " << Fixed(report.perplexity) << "\n";
  return kExitOk;
}

int EvalAccuracy(const EvalOptions& opts, std::ostream& table) {
  const auto examples = IndexById<MaskedExample>(ReadJsonl(Required(opts.examples, "examples")),
                                                 MaskedExampleFromJson);
  const auto predictions = IndexById<std::vector<Prediction>>(
      ReadJsonl(Required(opts.predictions, "predictions")), [](const Json& j) {
        std::vector<Prediction> preds;
        try {
          for (const Json& p : j.at("predictions")) {
            preds.push_back(Prediction{p.at("position").get<std::size_t>(),
                                       p.at("id").get<TokenId>()});
          }
        } catch (const Json::exception& e) {
          throw Error(ErrorCode::kSchemaMismatch, std::string("predictions: ") + e.what());
        }
        return preds;
      });
  CheckPairing(examples, predictions);

  std::vector<AccuracyRecord> records;
  for (const auto& [id, ex] : examples) {
    records.push_back(AccuracyRecord{id, MlmAccuracyCount(ex, predictions.at(id))});
  }
  const AccuracyReport report = AggregateAccuracy(std::move(records));
  std::vector<Json> out;
  for (const auto& r : report.records) {
    Json j;
    j["id"] = r.id;
    j["correct"] = r.count.correct;
    j["total"] = r.count.total;
    j["accuracy"] = r.count.accuracy();
    out.push_back(std::move(j));
  }
  Json agg;
  agg["id"] = "__aggregate__";
  agg["records"] = report.records.size();
  agg["correct"] = report.pooled.correct;
  agg["total"] = report.pooled.total;
  agg["accuracy"] = report.pooled.accuracy();
  out.push_back(std::move(agg));
  WriteJsonl(opts.out, out);

  table << "metric      value\n"
        << "records     " << report.records.size() << "\n"
        << "masked      " << report.pooled.total << "\n"
        << "ACC         " << Fixed(report.pooled.accuracy()) << "\n";
  return kExitOk;
}

}  // namespace

int RunEval(const EvalOptions& opts, std::ostream& table) {
  return Guarded([&] {
    if (opts.kind == "rouge") return EvalRouge(opts, table);
    if (opts.kind == "ppl") return EvalPerplexity(opts, table);
    if (opts.kind == "mlm-acc") return EvalAccuracy(opts, table);
    throw Error(ErrorCode::kInvalidStrategy, "eval kind must be rouge, ppl or mlm-acc");
  });
}

}  // namespace radsum::cli
