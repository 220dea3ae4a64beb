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

// Radiology report sectioning and cleaning.
//
// A report is split into sections at header lines. A header is a line that
// starts (after optional whitespace) with a run of two or more letters,
// spaces or slashes terminated by ':'. Matching is case-insensitive; the
// section name is the run uppercased with whitespace collapsed. Text on the
// header line after the colon starts the section body.
//
// A line reading "FINAL REPORT" is a banner: it closes the current section,
// is discarded, and marks every later section as part of the final report.
// Horizontal rule lines ("_____", "-----") are discarded the same way.

#ifndef RADSUM_REPORT_PARSER_HPP_
#define RADSUM_REPORT_PARSER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radsum {

enum class CorpusSource { kRetrain, kFinetune, kTest };

struct RawReport {
  std::string id;
  std::string text;
  CorpusSource source = CorpusSource::kRetrain;
};

struct Section {
  std::string name;  // canonical uppercase
  std::string body;  // raw text in [start, end), outer whitespace trimmed
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t header_start = 0;  // offset of the header's first letter
  bool in_final_report = false;  // appears after a FINAL REPORT banner
};

struct SectionedReport {
  std::string id;
  std::vector<Section> sections;
  bool has_final_report_marker = false;

  // First section with the given canonical name, if any.
  const Section* Find(std::string_view name) const;
};

struct SummPair {
  std::string id;
  std::string input_text;
  std::string target_text;
};

struct HeaderMatch {
  std::string name;             // canonical
  std::size_t name_begin = 0;   // offset of the first letter within the line
  std::size_t after_colon = 0;  // offset just past ':' within the line
};

// Applies the header grammar to a single line (no newline).
std::optional<HeaderMatch> MatchHeaderLine(std::string_view line);

// True for canonical names that feed the background slot of a pair:
// BACKGROUND, HISTORY, INDICATION, CLINICAL HISTORY.
bool IsBackgroundSection(std::string_view name);

// Throws Error(kNoSectionsFound) when the text is blank or has no header.
SectionedReport DetectSections(const RawReport& report);

// Removes de-identification placeholders ("[** ... **]"), numeric dates
// (d/d/d) and times (hh:mm[:ss] [AM|PM]), non-printable characters, heading
// names and bullet numbers ("1." / "2)" followed by whitespace), then
// collapses whitespace. Idempotent.
std::string CleanText(std::string_view body);

// Findings (optionally preceded by the background section) -> Impression.
// Throws kMissingFindings / kMissingImpression when either side cleans to
// nothing.
SummPair MakeSummPair(const SectionedReport& report,
                      bool include_background = true);

// Cleaned bodies of the retained sections joined by single spaces. When the
// report has a FINAL REPORT banner, the retained set is MEDICAL CONDITION,
// REASON FOR THIS EXAMINATION and everything after the banner; otherwise all
// sections except known administrative fields. Throws kNoRetainedSections.
std::string MakeRetrainText(const SectionedReport& report);

bool IsRetainedSection(const SectionedReport& report, const Section& section);

}  // namespace radsum

#endif  // RADSUM_REPORT_PARSER_HPP_
