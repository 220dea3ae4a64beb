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

// Subcommand implementations behind the `radsum` tool. Each Run* function
// returns a process exit status: 0 success, 1 partial (records skipped),
// 2 input error, 3 pairing or validation error.

#ifndef RADSUM_COMMANDS_HPP_
#define RADSUM_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radsum/error.hpp"

namespace radsum::cli {

enum ExitStatus : int {
  kExitOk = 0,
  kExitPartial = 1,
  kExitInputError = 2,
  kExitValidationError = 3,
};

int ExitStatusFor(ErrorCode code);

// Recommended decoding settings recorded in the pair-corpus manifest for
// downstream trainers.
inline constexpr int kRecommendedBeamSize = 5;
inline constexpr int kRecommendedNoRepeatNgram = 2;

struct ParseOptions {
  std::filesystem::path in;   // .jsonl file, text file, or directory of text files
  std::filesystem::path out;
  std::string mode = "retrain";  // retrain | finetune | sections
  bool include_background = true;
};
int RunParse(const ParseOptions& opts);

struct LexiconOptions {
  std::filesystem::path in;
  std::filesystem::path out;
  std::string level = "phrase";
  bool derive_word = false;
};
int RunLexicon(const LexiconOptions& opts, std::ostream& report);

struct AnnotateOptions {
  std::filesystem::path in;
  std::filesystem::path lexicon;
  std::string level = "phrase";
  std::filesystem::path out;
};
int RunAnnotate(const AnnotateOptions& opts);

struct VocabExtendOptions {
  std::filesystem::path vocab;
  std::optional<std::filesystem::path> vocab_manifest;
  std::filesystem::path lexicon;
  std::string level = "phrase";
  std::filesystem::path out;
  std::optional<std::filesystem::path> manifest;  // default <out>.manifest.json
};
int RunVocabExtend(const VocabExtendOptions& opts, std::ostream& report);

struct MaskOptions {
  std::filesystem::path in;
  std::filesystem::path vocab;
  std::optional<std::filesystem::path> vocab_manifest;  // default <vocab>.manifest.json if present
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::string> level;  // implied by entity strategies
  std::string strategy = "random";
  double mask_rate = 0.15;
  double entity_fraction = 1.0;
  std::optional<std::string> corruption;
  std::uint64_t seed = 42;
  std::filesystem::path out;
  std::optional<std::filesystem::path> manifest;  // default <out>.manifest.json
  unsigned workers = 1;
};
int RunMask(const MaskOptions& opts, std::ostream& report);

struct AblateOptions {
  MaskOptions base;  // in, vocab, lexicon, strategy, mask_rate, corruption, seed, workers
  std::vector<double> fractions;
  std::filesystem::path out_dir;
};
int RunAblate(const AblateOptions& opts, std::ostream& report);

// Seed used for one fraction of an ablation sweep.
std::uint64_t AblationSeed(std::uint64_t base_seed, double fraction);
std::string FormatFraction(double fraction);

struct SplitOptions {
  std::filesystem::path in;
  std::string splits;  // "train=70,val=20,test=10"
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};
int RunSplit(const SplitOptions& opts, std::ostream& report);

struct VerifyOptions {
  std::vector<std::filesystem::path> files;
};
int RunVerify(const VerifyOptions& opts, std::ostream& report);

struct EvalOptions {
  std::string kind;  // rouge | ppl | mlm-acc
  std::optional<std::filesystem::path> ref;
  std::optional<std::filesystem::path> hyp;
  std::optional<std::string> ref_field;
  std::optional<std::string> hyp_field;
  std::optional<std::filesystem::path> logprobs;
  std::optional<std::filesystem::path> examples;
  std::optional<std::filesystem::path> predictions;
  std::filesystem::path out;
};
int RunEval(const EvalOptions& opts, std::ostream& table);

}  // namespace radsum::cli

#endif  // RADSUM_COMMANDS_HPP_
