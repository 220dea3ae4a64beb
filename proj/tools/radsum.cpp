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

// radsum: corpus preparation and evaluation pipeline for radiology report
// summarization with entity-masked language modeling.
//
//   radsum parse        reports -> sections / retrain texts / summary pairs
//   radsum lexicon      normalize a term file, optionally derive word level
//   radsum annotate     entity spans per record
//   radsum vocab-extend add lexicon surfaces as atomic tokens
//   radsum mask         masked-LM corpus + manifest
//   radsum split        deterministic splits (or --verify existing ones)
//   radsum eval         rouge | ppl | mlm-acc
//   radsum ablate       one masked corpus per entity fraction

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "radsum/commands.hpp"
#include "radsum/file_util.hpp"
#include "radsum/log.hpp"

namespace fs = std::filesystem;
using namespace radsum::cli;

namespace {

// Relative output paths land under $RADSUM_OUT_DIR when it is set.
fs::path ResolveOut(const fs::path& p) {
  const char* dir = std::getenv("RADSUM_OUT_DIR");
  if (dir == nullptr || *dir == '\0' || p.is_absolute()) return p;
  fs::create_directories(dir);
  return fs::path(dir) / p;
}

const CLI::Validator kMaskRate(
    [](std::string& v) -> std::string {
      double rate = 0.0;
      try {
        rate = std::stod(v);
      } catch (const std::exception&) {
        return "not a number: " + v;
      }
      if (!(rate > 0.0 && rate <= 1.0)) return "mask rate must be in (0, 1], got " + v;
      return {};
    },
    "(0,1]");

// Resolved options of the subcommand that ran, in config-file syntax.
void WriteSnapshot(const CLI::App& cmd, const fs::path& target) {
  radsum::WriteFileAtomic(target, "[" + cmd.get_name() + "]\n" + cmd.config_to_str(true, false));
}

void AddMaskFlags(CLI::App* cmd, MaskOptions& m) {
  cmd->add_option("--in", m.in, "retrain-text JSONL {id,text}")->required();
  cmd->add_option("--vocab", m.vocab, "vocabulary file")->required();
  cmd->add_option("--vocab-manifest", m.vocab_manifest,
                  "extension manifest (default <vocab>.manifest.json if present)");
  cmd->add_option("--lexicon", m.lexicon, "entity term file");
  cmd->add_option("--level", m.level, "lexicon level: word|phrase (implied by strategy)");
  cmd->add_option("--mask-rate", m.mask_rate, "fraction of maskable tokens")
      ->check(kMaskRate)
      ->capture_default_str();
  cmd->add_option("--corruption", m.corruption, "pure-mask|bert-80-10-10");
  cmd->add_option("--seed", m.seed)->capture_default_str();
  cmd->add_option("--workers", m.workers)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radsum: radiology report corpus and evaluation toolkit"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("--quiet", quiet, "only log errors");

  ParseOptions parse_opts;
  auto* parse = app.add_subcommand("parse", "split reports into sections and build corpora");
  parse->add_option("--in", parse_opts.in, "JSONL {id,text}, a report file, or a directory")
      ->required();
  parse->add_option("--out", parse_opts.out)->required();
  parse->add_option("--mode", parse_opts.mode, "retrain|finetune|sections")
      ->check(CLI::IsMember({"retrain", "finetune", "sections"}))
      ->capture_default_str();
  bool no_background = false;
  parse->add_flag("--no-background", no_background,
                  "use findings only as the pair input (default prefixes the background)");

  LexiconOptions lex_opts;
  auto* lexicon = app.add_subcommand("lexicon", "normalize a term file");
  lexicon->add_option("--in", lex_opts.in)->required();
  lexicon->add_option("--out", lex_opts.out)->required();
  lexicon->add_option("--level", lex_opts.level)
      ->check(CLI::IsMember({"word", "phrase"}))
      ->capture_default_str();
  lexicon->add_flag("--derive-word", lex_opts.derive_word, "split phrases into a word lexicon");

  AnnotateOptions ann_opts;
  auto* annotate = app.add_subcommand("annotate", "find entity spans");
  annotate->add_option("--in", ann_opts.in, "JSONL {id,text}")->required();
  annotate->add_option("--lexicon", ann_opts.lexicon)->required();
  annotate->add_option("--level", ann_opts.level)
      ->check(CLI::IsMember({"word", "phrase"}))
      ->capture_default_str();
  annotate->add_option("--out", ann_opts.out)->required();

  VocabExtendOptions vx_opts;
  auto* vocab = app.add_subcommand("vocab-extend", "append entity tokens to a vocabulary");
  vocab->add_option("--vocab", vx_opts.vocab)->required();
  vocab->add_option("--vocab-manifest", vx_opts.vocab_manifest);
  vocab->add_option("--lexicon", vx_opts.lexicon)->required();
  vocab->add_option("--level", vx_opts.level)
      ->check(CLI::IsMember({"word", "phrase"}))
      ->capture_default_str();
  vocab->add_option("--out", vx_opts.out)->required();
  vocab->add_option("--manifest", vx_opts.manifest);

  MaskOptions mask_opts;
  auto* mask = app.add_subcommand("mask", "generate a masked-LM corpus");
  AddMaskFlags(mask, mask_opts);
  mask->add_option("--strategy", mask_opts.strategy, "random|entity-word|entity-phrase")
      ->check(CLI::IsMember({"random", "entity-word", "entity-phrase"}))
      ->capture_default_str();
  mask->add_option("--entity-fraction", mask_opts.entity_fraction,
                   "share of the mask budget drawn from entity tokens")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  mask->add_option("--out", mask_opts.out)->required();
  mask->add_option("--manifest", mask_opts.manifest);

  AblateOptions abl_opts;
  abl_opts.base.strategy = "entity-word";
  auto* ablate = app.add_subcommand("ablate", "sweep the entity share of the mask budget");
  AddMaskFlags(ablate, abl_opts.base);
  ablate->add_option("--strategy", abl_opts.base.strategy, "entity-word|entity-phrase")
      ->check(CLI::IsMember({"entity-word", "entity-phrase"}))
      ->capture_default_str();
  ablate->add_option("--fractions", abl_opts.fractions, "comma-separated entity fractions")
      ->delimiter(',')
      ->required();
  ablate->add_option("--out-dir", abl_opts.out_dir)->required();

  SplitOptions split_opts;
  VerifyOptions verify_opts;
  auto* split = app.add_subcommand("split", "deterministic train/val/test splits");
  split->add_option("--in", split_opts.in);
  split->add_option("--splits", split_opts.splits, "name=size|ratio,...");
  split->add_option("--seed", split_opts.seed)->capture_default_str();
  split->add_option("--out-dir", split_opts.out_dir);
  split->add_option("--verify", verify_opts.files, "check existing split files for overlap")
      ->excludes(split->get_option("--in"))
      ->excludes(split->get_option("--splits"));

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "score outputs");
  eval->add_option("--kind", eval_opts.kind, "rouge|ppl|mlm-acc")
      ->check(CLI::IsMember({"rouge", "ppl", "mlm-acc"}))
      ->required();
  eval->add_option("--ref", eval_opts.ref, "reference JSONL (rouge)");
  eval->add_option("--hyp", eval_opts.hyp, "hypothesis JSONL (rouge)");
  eval->add_option("--ref-field", eval_opts.ref_field);
  eval->add_option("--hyp-field", eval_opts.hyp_field);
  eval->add_option("--logprobs", eval_opts.logprobs, "log-prob JSONL (ppl)");
  eval->add_option("--examples", eval_opts.examples, "masked corpus JSONL (mlm-acc)");
  eval->add_option("--predictions", eval_opts.predictions, "predictions JSONL (mlm-acc)");
  eval->add_option("--out", eval_opts.out)->required();

  // Lets a saved snapshot ("[parse]" section) select its subcommand.
  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ValidationError& e) {
    app.exit(e);
    return kExitValidationError;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }
  if (quiet) radsum::SetLogLevel(radsum::LogLevel::kError);

  int status = kExitOk;
  fs::path snapshot;
  CLI::App* used = nullptr;
  if (parse->parsed()) {
    parse_opts.out = ResolveOut(parse_opts.out);
    parse_opts.include_background = !no_background;
    status = RunParse(parse_opts);
    used = parse;
    snapshot = parse_opts.out;
  } else if (lexicon->parsed()) {
    lex_opts.out = ResolveOut(lex_opts.out);
    status = RunLexicon(lex_opts, std::cout);
    used = lexicon;
    snapshot = lex_opts.out;
  } else if (annotate->parsed()) {
    ann_opts.out = ResolveOut(ann_opts.out);
    status = RunAnnotate(ann_opts);
    used = annotate;
    snapshot = ann_opts.out;
  } else if (vocab->parsed()) {
    vx_opts.out = ResolveOut(vx_opts.out);
    status = RunVocabExtend(vx_opts, std::cout);
    used = vocab;
    snapshot = vx_opts.out;
  } else if (mask->parsed()) {
    mask_opts.out = ResolveOut(mask_opts.out);
    status = RunMask(mask_opts, std::cout);
    used = mask;
    snapshot = mask_opts.out;
  } else if (ablate->parsed()) {
    abl_opts.out_dir = ResolveOut(abl_opts.out_dir);
    status = RunAblate(abl_opts, std::cout);
    used = ablate;
    snapshot = abl_opts.out_dir / "ablation";
  } else if (split->parsed()) {
    if (!verify_opts.files.empty()) {
      return RunVerify(verify_opts, std::cout);
    }
    if (split_opts.in.empty() || split_opts.splits.empty() || split_opts.out_dir.empty()) {
      std::cerr << "split: --in, --splits and --out-dir are required (or --verify FILES)\n";
      return kExitInputError;
    }
    split_opts.out_dir = ResolveOut(split_opts.out_dir);
    status = RunSplit(split_opts, std::cout);
    used = split;
    snapshot = split_opts.out_dir / "split";
  } else if (eval->parsed()) {
    eval_opts.out = ResolveOut(eval_opts.out);
    status = RunEval(eval_opts, std::cout);
    used = eval;
    snapshot = eval_opts.out;
  }
  if (used != nullptr && status <= kExitPartial) {
    snapshot += ".config.ini";
    WriteSnapshot(*used, snapshot);
  }
  return status;
}
