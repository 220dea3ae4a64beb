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

#include "radsum/error.hpp"

namespace radsum {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoSectionsFound: return "NoSectionsFound";
    case ErrorCode::kMissingFindings: return "MissingFindings";
    case ErrorCode::kMissingImpression: return "MissingImpression";
    case ErrorCode::kNoRetainedSections: return "NoRetainedSections";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyLexicon: return "EmptyLexicon";
    case ErrorCode::kInvalidVocabulary: return "InvalidVocabulary";
    case ErrorCode::kUnencodableCharacter: return "UnencodableCharacter";
    case ErrorCode::kInvalidTokenId: return "InvalidTokenId";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kInvalidStrategy: return "InvalidStrategy";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFiniteLogProb: return "NonFiniteLogProb";
    case ErrorCode::kInvalidLogProb: return "InvalidLogProb";
    case ErrorCode::kPositionMismatch: return "PositionMismatch";
    case ErrorCode::kUnmatchedIds: return "UnmatchedIds";
    case ErrorCode::kInsufficientRecords: return "InsufficientRecords";
    case ErrorCode::kInvalidSplitSpec: return "InvalidSplitSpec";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace radsum
