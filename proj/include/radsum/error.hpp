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

#ifndef RADSUM_ERROR_HPP_
#define RADSUM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace radsum {

enum class ErrorCode {
  // report_parser
  kNoSectionsFound,
  kMissingFindings,
  kMissingImpression,
  kNoRetainedSections,
  // entity_lexicon
  kParseError,
  kEmptyLexicon,
  // tokenizer
  kInvalidVocabulary,
  kUnencodableCharacter,
  kInvalidTokenId,
  // masker
  kEmptySequence,
  kConfigMismatch,
  kInvalidStrategy,
  // metrics
  kEmptyReference,
  kEmptyInput,
  kNonFiniteLogProb,
  kInvalidLogProb,
  kPositionMismatch,
  kUnmatchedIds,
  // corpus_io
  kInsufficientRecords,
  kInvalidSplitSpec,
  kDuplicateId,
  kSchemaMismatch,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as radsum::Error; callers that run in
// batch mode catch the per-record codes and skip the record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace radsum

#endif  // RADSUM_ERROR_HPP_
