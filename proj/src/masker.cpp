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

#include "radsum/masker.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "json.hpp"
#include "radsum/error.hpp"
#include "radsum/hash.hpp"
#include "radsum/log.hpp"
#include "radsum/random.hpp"

namespace radsum {
namespace {

// Round half to even, so tied budget splits do not drift toward one pool.
std::size_t RoundCount(double x) {
  const double lo = std::floor(x);
  const double frac = x - lo;
  auto n = static_cast<std::size_t>(lo);
  if (frac > 0.5 || (frac == 0.5 && n % 2 == 1)) ++n;
  return n;
}

constexpr double kMaskShare = 0.8;
constexpr double kRandomShare = 0.1;

MaskBranch DrawBranch(Corruption corruption, Rng& rng) {
  if (corruption == Corruption::kPureMask) return MaskBranch::kMask;
  const double u = rng.Uniform01();
  if (u < kMaskShare) return MaskBranch::kMask;
  if (u < kMaskShare + kRandomShare) return MaskBranch::kRandomToken;
  return MaskBranch::kKeep;
}

// Applies corruption to the sorted `positions` of `seq`.
MaskedExample Corrupt(const TokenSequence& seq, const Vocabulary& vocab,
                      Corruption corruption, std::vector<std::size_t> positions,
                      std::string_view record_id, Rng& rng) {
  MaskedExample ex;
  ex.id = std::string(record_id);
  ex.input_ids = seq.ids;
  ex.mask_positions = std::move(positions);
  ex.originals.reserve(ex.mask_positions.size());
  ex.branches.reserve(ex.mask_positions.size());
  const auto random_range = static_cast<std::uint64_t>(vocab.size()) - kNumSpecialTokens;
  for (std::size_t pos : ex.mask_positions) {
    ex.originals.push_back(seq.ids[pos]);
    const MaskBranch branch = DrawBranch(corruption, rng);
    ex.branches.push_back(branch);
    switch (branch) {
      case MaskBranch::kMask:
        ex.input_ids[pos] = kMaskId;
        break;
      case MaskBranch::kRandomToken:
        ex.input_ids[pos] = static_cast<TokenId>(kNumSpecialTokens + rng.Below(random_range));
        break;
      case MaskBranch::kKeep:
        break;
    }
  }
  return ex;
}

// Moves `count` uniformly chosen elements of `pool` to its front.
void PartialShuffle(std::vector<std::size_t>& pool, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
}

void CheckSequence(const TokenSequence& seq, const Vocabulary& vocab) {
  if (seq.empty()) throw Error(ErrorCode::kEmptySequence, "nothing to mask");
  for (TokenId id : seq.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab.size()) {
      throw Error(ErrorCode::kInvalidTokenId, std::to_string(id));
    }
  }
}

}  // namespace

std::string_view MaskingKindName(MaskingKind kind) {
  switch (kind) {
    case MaskingKind::kRandom: return "random";
    case MaskingKind::kEntityWord: return "entity-word";
    case MaskingKind::kEntityPhrase: return "entity-phrase";
  }
  return "random";
}

MaskingKind ParseMaskingKind(std::string_view name) {
  if (name == "random") return MaskingKind::kRandom;
  if (name == "entity-word" || name == "entity_word") return MaskingKind::kEntityWord;
  if (name == "entity-phrase" || name == "entity_phrase") return MaskingKind::kEntityPhrase;
  throw Error(ErrorCode::kInvalidStrategy, "unknown strategy '" + std::string(name) + "'");
}

std::string_view CorruptionName(Corruption corruption) {
  return corruption == Corruption::kPureMask ? "pure-mask" : "bert-80-10-10";
}

Corruption ParseCorruption(std::string_view name) {
  if (name == "pure-mask" || name == "pure_mask") return Corruption::kPureMask;
  if (name == "bert-80-10-10" || name == "bert_80_10_10") return Corruption::kBert801010;
  throw Error(ErrorCode::kInvalidStrategy, "unknown corruption '" + std::string(name) + "'");
}

MaskingStrategy MaskingStrategy::For(MaskingKind kind, std::uint64_t seed) {
  MaskingStrategy s;
  s.kind = kind;
  s.seed = seed;
  s.corruption = kind == MaskingKind::kRandom ? Corruption::kBert801010 : Corruption::kPureMask;
  return s;
}

void MaskingStrategy::Validate() const {
  if (!(mask_rate > 0.0 && mask_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidStrategy, "mask_rate must be in (0, 1]");
  }
  if (!(entity_fraction >= 0.0 && entity_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidStrategy, "entity_fraction must be in [0, 1]");
  }
}

std::vector<TokenId> MaskedExample::Restore() const {
  std::vector<TokenId> ids = input_ids;
  for (std::size_t k = 0; k < mask_positions.size(); ++k) {
    ids[mask_positions[k]] = originals[k];
  }
  return ids;
}

std::uint64_t RecordSeed(std::uint64_t seed, std::string_view record_id) {
  return seed ^ Fnv1a64(record_id);
}

MaskedExample ApplyRandomMasking(const TokenSequence& seq, const Vocabulary& vocab,
                                 const MaskingStrategy& strategy,
                                 std::string_view record_id) {
  if (strategy.kind != MaskingKind::kRandom) {
    throw Error(ErrorCode::kInvalidStrategy, "random masking needs the random strategy");
  }
  CheckSequence(seq, vocab);
  Rng rng(RecordSeed(strategy.seed, record_id));
  std::vector<std::size_t> selected;
  for (std::size_t pos = 0; pos < seq.size(); ++pos) {
    if (IsSpecialId(seq.ids[pos])) continue;
    if (rng.Uniform01() < strategy.mask_rate) selected.push_back(pos);
  }
  return Corrupt(seq, vocab, strategy.corruption, std::move(selected), record_id, rng);
}

MaskedExample ApplyEntityMasking(const TokenSequence& seq, const Vocabulary& vocab,
                                 const MaskingStrategy& strategy,
                                 std::string_view record_id) {
  if (strategy.kind == MaskingKind::kRandom) {
    throw Error(ErrorCode::kInvalidStrategy, "entity masking needs an entity strategy");
  }
  CheckSequence(seq, vocab);
  std::vector<std::size_t> entity_pool;
  std::vector<std::size_t> other_pool;
  for (std::size_t pos = 0; pos < seq.size(); ++pos) {
    const TokenId id = seq.ids[pos];
    if (IsSpecialId(id)) continue;
    (vocab.IsEntity(id) ? entity_pool : other_pool).push_back(pos);
  }
  const std::size_t maskable = entity_pool.size() + other_pool.size();
  const auto budget = std::min<std::size_t>(
      maskable, RoundCount(strategy.mask_rate * static_cast<double>(maskable)));
  const std::size_t entity_target =
      RoundCount(strategy.entity_fraction * static_cast<double>(budget));

  std::size_t take_entity = std::min(entity_target, entity_pool.size());
  std::size_t take_other = budget - take_entity;
  if (take_other > other_pool.size()) {
    take_entity += take_other - other_pool.size();
    take_other = other_pool.size();
  }

  Rng rng(RecordSeed(strategy.seed, record_id));
  PartialShuffle(entity_pool, take_entity, rng);
  PartialShuffle(other_pool, take_other, rng);
  std::vector<std::size_t> selected(entity_pool.begin(), entity_pool.begin() + take_entity);
  selected.insert(selected.end(), other_pool.begin(), other_pool.begin() + take_other);
  std::sort(selected.begin(), selected.end());
  return Corrupt(seq, vocab, strategy.corruption, std::move(selected), record_id, rng);
}

double MaskingManifest::realized_mask_rate() const {
  return maskable_positions == 0
             ? 0.0
             : static_cast<double>(masked_positions) / static_cast<double>(maskable_positions);
}

double MaskingManifest::realized_entity_share() const {
  return masked_positions == 0 ? 0.0
                               : static_cast<double>(entity_masked_positions) /
                                     static_cast<double>(masked_positions);
}

std::string MaskingManifest::ToJson() const {
  nlohmann::ordered_json strat;
  strat["kind"] = MaskingKindName(strategy.kind);
  strat["mask_rate"] = strategy.mask_rate;
  strat["entity_fraction"] = strategy.entity_fraction;
  strat["corruption"] = CorruptionName(strategy.corruption);
  nlohmann::ordered_json m;
  m["strategy"] = std::move(strat);
  m["seed"] = strategy.seed;
  m["records"] = records;
  m["dropped"] = dropped;
  m["realized_mask_rate"] = realized_mask_rate();
  m["realized_entity_share"] = realized_entity_share();
  m["vocab_hash"] = vocab_hash;
  m["maskable_positions"] = maskable_positions;
  m["masked_positions"] = masked_positions;
  m["entity_masked_positions"] = entity_masked_positions;
  m["branch_counts"] = {{"mask", branch_mask}, {"random", branch_random}, {"keep", branch_keep}};
  return m.dump() + "\n";
}

namespace {

void CheckConfig(const Vocabulary& vocab, const EntityLexicon* lexicon,
                 const MaskingStrategy& strategy) {
  if (strategy.kind == MaskingKind::kRandom) return;
  const LexiconLevel want = strategy.kind == MaskingKind::kEntityWord ? LexiconLevel::kWord
                                                                      : LexiconLevel::kPhrase;
  if (lexicon == nullptr) {
    throw Error(ErrorCode::kConfigMismatch, "entity strategy requires a lexicon");
  }
  if (lexicon->level() != want) {
    throw Error(ErrorCode::kConfigMismatch,
                std::string(MaskingKindName(strategy.kind)) + " needs a " +
                    std::string(LexiconLevelName(want)) + "-level lexicon");
  }
  if (vocab.entity_token_ids().empty()) {
    throw Error(ErrorCode::kConfigMismatch, "vocabulary has no entity tokens");
  }
  for (const auto& e : lexicon->entries()) {
    auto id = vocab.Find(e.surface);
    if (!id || !vocab.IsEntity(*id)) {
      throw Error(ErrorCode::kConfigMismatch,
                  "vocabulary was not extended with '" + e.surface + "'");
    }
  }
}

std::optional<MaskedExample> MaskRecord(const TextRecord& record, const Vocabulary& vocab,
                                        const EntityLexicon* lexicon,
                                        const MaskingStrategy& strategy) {
  TokenSequence seq;
  try {
    seq = Encode(vocab, lexicon, record.text);
  } catch (const Error& e) {
    LogWarn("record '" + record.id + "' dropped: " + e.what());
    return std::nullopt;
  }
  if (seq.empty()) return std::nullopt;
  return strategy.kind == MaskingKind::kRandom
             ? ApplyRandomMasking(seq, vocab, strategy, record.id)
             : ApplyEntityMasking(seq, vocab, strategy, record.id);
}

}  // namespace

MlmCorpus GenerateMlmCorpus(const std::vector<TextRecord>& records,
                            const Vocabulary& vocab, const EntityLexicon* lexicon,
                            const MaskingStrategy& strategy, unsigned workers) {
  strategy.Validate();
  CheckConfig(vocab, lexicon, strategy);

  std::vector<std::optional<MaskedExample>> results(records.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      results[i] = MaskRecord(records[i], vocab, lexicon, strategy);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(records.size())));
  if (workers <= 1) {
    run(0, records.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (records.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(records.size(), begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  MlmCorpus corpus;
  corpus.manifest.strategy = strategy;
  corpus.manifest.vocab_hash = vocab.ContentHash();
  for (auto& r : results) {
    if (!r) {
      ++corpus.manifest.dropped;
      continue;
    }
    MaskingManifest& m = corpus.manifest;
    for (TokenId id : r->Restore()) {
      if (!IsSpecialId(id)) ++m.maskable_positions;
    }
    m.masked_positions += r->mask_positions.size();
    for (std::size_t k = 0; k < r->originals.size(); ++k) {
      if (vocab.IsEntity(r->originals[k])) ++m.entity_masked_positions;
      switch (r->branches[k]) {
        case MaskBranch::kMask: ++m.branch_mask; break;
        case MaskBranch::kRandomToken: ++m.branch_random; break;
        case MaskBranch::kKeep: ++m.branch_keep; break;
      }
    }
    ++m.records;
    corpus.examples.push_back(std::move(*r));
  }
  return corpus;
}

}  // namespace radsum
