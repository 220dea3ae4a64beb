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

// Masked-LM example generation.
//
// Random strategy: every non-special position is selected independently with
// probability mask_rate (BERT style). Entity strategies: a fixed budget
// B = round(mask_rate * maskable) is split into round(entity_fraction * B)
// entity positions and the remainder from non-entity positions, both drawn
// without replacement. Both roundings send ties to even. A pool that runs
// short spills into the other one, so every record gets exactly B masks.
//
// Each record is seeded from (strategy seed, record id), which makes output
// independent of how records are distributed across workers.

#ifndef RADSUM_MASKER_HPP_
#define RADSUM_MASKER_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "radsum/entity_lexicon.hpp"
#include "radsum/tokenizer.hpp"

namespace radsum {

enum class MaskingKind { kRandom, kEntityWord, kEntityPhrase };
enum class Corruption { kPureMask, kBert801010 };

// What happened at a selected position.
enum class MaskBranch : std::uint8_t { kMask, kRandomToken, kKeep };

std::string_view MaskingKindName(MaskingKind kind);
MaskingKind ParseMaskingKind(std::string_view name);
std::string_view CorruptionName(Corruption corruption);
Corruption ParseCorruption(std::string_view name);

struct MaskingStrategy {
  MaskingKind kind = MaskingKind::kRandom;
  double mask_rate = 0.15;
  double entity_fraction = 1.0;
  Corruption corruption = Corruption::kBert801010;
  std::uint64_t seed = 0;

  // Defaults corruption by kind: 80/10/10 for random, pure mask otherwise.
  static MaskingStrategy For(MaskingKind kind, std::uint64_t seed);

  // Throws kInvalidStrategy unless 0 < mask_rate <= 1 and
  // 0 <= entity_fraction <= 1.
  void Validate() const;
};

struct MaskedExample {
  std::string id;
  std::vector<TokenId> input_ids;
  std::vector<std::size_t> mask_positions;  // strictly increasing
  std::vector<TokenId> originals;
  std::vector<MaskBranch> branches;          // parallel to mask_positions

  // Writes originals back at mask_positions.
  std::vector<TokenId> Restore() const;
};

// Per-record RNG seed.
std::uint64_t RecordSeed(std::uint64_t seed, std::string_view record_id);

// Throws kEmptySequence. mask_rate may be 0 here (nothing selected); the
// CLI rejects it earlier.
MaskedExample ApplyRandomMasking(const TokenSequence& seq, const Vocabulary& vocab,
                                 const MaskingStrategy& strategy,
                                 std::string_view record_id);

MaskedExample ApplyEntityMasking(const TokenSequence& seq, const Vocabulary& vocab,
                                 const MaskingStrategy& strategy,
                                 std::string_view record_id);

struct TextRecord {
  std::string id;
  std::string text;
};

struct MaskingManifest {
  MaskingStrategy strategy;
  std::size_t records = 0;
  std::size_t dropped = 0;
  std::size_t maskable_positions = 0;
  std::size_t masked_positions = 0;
  std::size_t entity_masked_positions = 0;
  std::size_t branch_mask = 0;
  std::size_t branch_random = 0;
  std::size_t branch_keep = 0;
  std::string vocab_hash;

  double realized_mask_rate() const;
  double realized_entity_share() const;
  std::string ToJson() const;
};

struct MlmCorpus {
  std::vector<MaskedExample> examples;
  MaskingManifest manifest;
};

// Encodes and masks every record. Records that encode to nothing are dropped
// and counted. `workers` > 1 fans records out over threads; output order and
// bytes do not depend on it. Throws kConfigMismatch when an entity strategy
// lacks a matching lexicon or the vocabulary lacks its surfaces.
MlmCorpus GenerateMlmCorpus(const std::vector<TextRecord>& records,
                            const Vocabulary& vocab, const EntityLexicon* lexicon,
                            const MaskingStrategy& strategy, unsigned workers = 1);

}  // namespace radsum

#endif  // RADSUM_MASKER_HPP_
