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

// Evaluation metrics: ROUGE-L, perplexity, masked-token accuracy.
//
// Log probabilities are base 2 throughout. ROUGE-L works on whole summaries
// after metric tokenization (lowercase, maximal alphanumeric runs).

#ifndef RADSUM_METRICS_HPP_
#define RADSUM_METRICS_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radsum/masker.hpp"

namespace radsum {

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Length of a longest common subsequence. O(|a|*|b|) time, O(min) memory.
template <typename T>
std::size_t LcsLength(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (const T& x : a) {
    std::size_t diag = 0;  // row[j-1] from the previous iteration of the outer loop
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = x == b[j - 1] ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

template <typename T>
std::size_t LcsLength(const std::vector<T>& a, const std::vector<T>& b) {
  return LcsLength(std::span<const T>(a), std::span<const T>(b));
}

std::vector<std::string> MetricTokenize(std::string_view text);

// Throws kEmptyReference when the reference has no tokens.
RougeScore RougeL(std::string_view reference, std::string_view candidate);
RougeScore RougeLTokens(std::span<const std::string> reference,
                        std::span<const std::string> candidate);

// Mean of -log2 p in bits. Throws kEmptyInput, kNonFiniteLogProb (NaN/inf)
// and kInvalidLogProb (positive values).
double MeanCrossEntropy(std::span<const double> log2_probs);
// 2^MeanCrossEntropy.
double Perplexity(std::span<const double> log2_probs);

enum class LogBase { kTwo, kE };
LogBase ParseLogBase(std::string_view name);
std::vector<double> ToLog2(std::span<const double> logs, LogBase base);

struct Prediction {
  std::size_t position = 0;
  TokenId id = 0;
};

struct AccuracyCount {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

// Predictions must cover exactly the example's mask positions (any order);
// throws kPositionMismatch otherwise.
AccuracyCount MlmAccuracyCount(const MaskedExample& example,
                               std::span<const Prediction> predictions);

// Pools over all pairs; examples and predictions are matched by record id.
// Throws kUnmatchedIds listing up to ten offending ids.
double MlmAccuracy(const std::vector<MaskedExample>& examples,
                   const std::map<std::string, std::vector<Prediction>>& predictions);

// ---- corpus reports -------------------------------------------------------

struct RougeRecord {
  std::string id;
  RougeScore score;
  std::optional<double> external;  // externally computed score, e.g. BERTScore
};

struct RougeReport {
  std::vector<RougeRecord> records;
  RougeScore mean;
  std::optional<double> external_mean;
};

// Per-record ROUGE-L plus arithmetic means.
RougeReport AggregateRouge(std::vector<RougeRecord> records);

struct PerplexityRecord {
  std::string id;
  std::size_t tokens = 0;
  double cross_entropy = 0.0;  // bits
  double perplexity = 1.0;
};

struct PerplexityReport {
  std::vector<PerplexityRecord> records;
  std::size_t tokens = 0;
  double cross_entropy = 0.0;  // pooled over all tokens
  double perplexity = 1.0;
};

PerplexityReport AggregatePerplexity(std::vector<PerplexityRecord> records);

struct AccuracyRecord {
  std::string id;
  AccuracyCount count;
};

struct AccuracyReport {
  std::vector<AccuracyRecord> records;
  AccuracyCount pooled;
};

AccuracyReport AggregateAccuracy(std::vector<AccuracyRecord> records);

}  // namespace radsum

#endif  // RADSUM_METRICS_HPP_
