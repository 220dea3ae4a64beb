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

#include "radsum/metrics.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "radsum/error.hpp"

namespace radsum {

std::vector<std::string> MetricTokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

RougeScore RougeLTokens(std::span<const std::string> reference,
                        std::span<const std::string> candidate) {
  if (reference.empty()) throw Error(ErrorCode::kEmptyReference, "reference has no tokens");
  if (candidate.empty()) return RougeScore{};
  const auto lcs = static_cast<double>(LcsLength(reference, candidate));
  RougeScore s;
  s.recall = lcs / static_cast<double>(reference.size());
  s.precision = lcs / static_cast<double>(candidate.size());
  s.f1 = s.recall + s.precision == 0.0
             ? 0.0
             : 2.0 * s.recall * s.precision / (s.recall + s.precision);
  return s;
}

RougeScore RougeL(std::string_view reference, std::string_view candidate) {
  const auto ref = MetricTokenize(reference);
  const auto cand = MetricTokenize(candidate);
  return RougeLTokens(ref, cand);
}

double MeanCrossEntropy(std::span<const double> log2_probs) {
  if (log2_probs.empty()) throw Error(ErrorCode::kEmptyInput, "no log probabilities");
  // Neumaier summation keeps the mean exact for long, uneven inputs.
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : log2_probs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteLogProb, std::to_string(v));
    if (v > 0.0) throw Error(ErrorCode::kInvalidLogProb, "log probability above zero");
    const double t = sum + v;
    compensation += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double mean = -(sum + compensation) / static_cast<double>(log2_probs.size());
  return mean <= 0.0 ? 0.0 : mean;
}

double Perplexity(std::span<const double> log2_probs) {
  return std::exp2(MeanCrossEntropy(log2_probs));
}

LogBase ParseLogBase(std::string_view name) {
  if (name == "2") return LogBase::kTwo;
  if (name == "e") return LogBase::kE;
  throw Error(ErrorCode::kInvalidLogProb, "log base must be \"2\" or \"e\"");
}

std::vector<double> ToLog2(std::span<const double> logs, LogBase base) {
  std::vector<double> out(logs.begin(), logs.end());
  if (base == LogBase::kE) {
    for (double& v : out) v /= std::log(2.0);
  }
  return out;
}

AccuracyCount MlmAccuracyCount(const MaskedExample& example,
                               std::span<const Prediction> predictions) {
  if (predictions.size() != example.mask_positions.size()) {
    throw Error(ErrorCode::kPositionMismatch,
                "record '" + example.id + "': " + std::to_string(predictions.size()) +
                    " predictions for " + std::to_string(example.mask_positions.size()) +
                    " masked positions");
  }
  std::set<std::size_t> seen;
  AccuracyCount count;
  for (const auto& p : predictions) {
    auto it = std::lower_bound(example.mask_positions.begin(), example.mask_positions.end(),
                               p.position);
    if (it == example.mask_positions.end() || *it != p.position ||
        !seen.insert(p.position).second) {
      throw Error(ErrorCode::kPositionMismatch,
                  "record '" + example.id + "': position " + std::to_string(p.position) +
                      " is not a masked position or is repeated");
    }
    const auto k = static_cast<std::size_t>(it - example.mask_positions.begin());
    if (example.originals[k] == p.id) ++count.correct;
    ++count.total;
  }
  return count;
}

double MlmAccuracy(const std::vector<MaskedExample>& examples,
                   const std::map<std::string, std::vector<Prediction>>& predictions) {
  std::vector<std::string> unmatched;
  std::set<std::string> example_ids;
  AccuracyCount pooled;
  for (const auto& ex : examples) {
    example_ids.insert(ex.id);
    auto it = predictions.find(ex.id);
    if (it == predictions.end()) {
      unmatched.push_back(ex.id);
      continue;
    }
    AccuracyCount c = MlmAccuracyCount(ex, it->second);
    pooled.correct += c.correct;
    pooled.total += c.total;
  }
  for (const auto& [id, preds] : predictions) {
    if (!example_ids.count(id)) unmatched.push_back(id);
  }
  if (!unmatched.empty()) {
    std::string list;
    for (std::size_t i = 0; i < unmatched.size() && i < 10; ++i) {
      if (i) list += ", ";
      list += unmatched[i];
    }
    throw Error(ErrorCode::kUnmatchedIds,
                std::to_string(unmatched.size()) + " unmatched ids: " + list);
  }
  return pooled.accuracy();
}

RougeReport AggregateRouge(std::vector<RougeRecord> records) {
  RougeReport report;
  report.records = std::move(records);
  if (report.records.empty()) return report;
  double r = 0.0, p = 0.0, f = 0.0, ext = 0.0;
  std::size_t ext_n = 0;
  for (const auto& rec : report.records) {
    r += rec.score.recall;
    p += rec.score.precision;
    f += rec.score.f1;
    if (rec.external) {
      ext += *rec.external;
      ++ext_n;
    }
  }
  const auto n = static_cast<double>(report.records.size());
  report.mean = RougeScore{r / n, p / n, f / n};
  if (ext_n > 0) report.external_mean = ext / static_cast<double>(ext_n);
  return report;
}

PerplexityReport AggregatePerplexity(std::vector<PerplexityRecord> records) {
  PerplexityReport report;
  report.records = std::move(records);
  double bits = 0.0;
  for (const auto& rec : report.records) {
    report.tokens += rec.tokens;
    bits += rec.cross_entropy * static_cast<double>(rec.tokens);
  }
  if (report.tokens > 0) {
    report.cross_entropy = bits / static_cast<double>(report.tokens);
    report.perplexity = std::exp2(report.cross_entropy);
  }
  return report;
}

AccuracyReport AggregateAccuracy(std::vector<AccuracyRecord> records) {
  AccuracyReport report;
  report.records = std::move(records);
  for (const auto& rec : report.records) {
    report.pooled.correct += rec.count.correct;
    report.pooled.total += rec.count.total;
  }
  return report;
}

}  // namespace radsum
