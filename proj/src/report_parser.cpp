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

#include "radsum/report_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "radsum/error.hpp"

namespace radsum {
namespace {

constexpr std::array<std::string_view, 3> kPreBannerRetained = {
    "MEDICAL CONDITION", "UNDERLYING MEDICAL CONDITION",
    "REASON FOR THIS EXAMINATION"};

constexpr std::array<std::string_view, 8> kAdministrative = {
    "ADMITTING DIAGNOSIS", "REASON",    "CONTRAINDICATIONS FOR IV CONTRAST",
    "CLIP",                "DICTATED BY", "SIGNED BY",
    "DATE",                "TIME"};

constexpr std::array<std::string_view, 4> kBackgroundAliases = {
    "BACKGROUND", "HISTORY", "INDICATION", "CLINICAL HISTORY"};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool IsDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }
bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::string CanonicalName(std::string_view run) {
  std::string out;
  bool pending_space = false;
  for (char c : Trim(run)) {
    if (IsSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool IsBannerLine(std::string_view line) {
  std::string_view t = Trim(line);
  if (t.empty()) return false;
  if (CanonicalName(t) == "FINAL REPORT") return true;
  if (t.size() < 3) return false;
  return std::all_of(t.begin(), t.end(), [](char c) {
    return c == '_' || c == '-' || c == '=' || c == '*' || c == '~' || IsSpace(c);
  });
}

template <std::size_t N>
bool Contains(const std::array<std::string_view, N>& set, std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

// ---- cleaning passes -----------------------------------------------------

std::string DropIllegal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if ((u >= 0x20 && u <= 0x7e) || c == '\n' || c == '\t') out.push_back(c);
  }
  return out;
}

std::string DropPlaceholders(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t open = s.find("[**", i);
    if (open == std::string_view::npos) break;
    std::size_t close = s.find("**]", open + 3);
    if (close == std::string_view::npos) break;
    out.append(s.substr(i, open - i));
    out.push_back(' ');
    i = close + 3;
  }
  out.append(s.substr(i));
  return out;
}

std::size_t DigitRun(std::string_view s, std::size_t i) {
  std::size_t j = i;
  while (j < s.size() && IsDigit(s[j])) ++j;
  return j - i;
}

// Length of a date or time starting at i, or 0.
std::size_t MatchDateTime(std::string_view s, std::size_t i) {
  auto boundary_after = [&](std::size_t j) {
    return j >= s.size() || !IsAlnum(s[j]);
  };
  std::size_t a = DigitRun(s, i);
  if (a == 0) return 0;
  std::size_t j = i + a;
  // d/d/d
  if (j < s.size() && s[j] == '/') {
    std::size_t b = DigitRun(s, j + 1);
    if (b > 0 && j + 1 + b < s.size() && s[j + 1 + b] == '/') {
      std::size_t c = DigitRun(s, j + 2 + b);
      std::size_t end = j + 2 + b + c;
      if (c > 0 && boundary_after(end) && (end >= s.size() || s[end] != '/')) {
        return end - i;
      }
    }
  }
  // hh:mm[:ss] [AM|PM]
  if (a <= 2 && j < s.size() && s[j] == ':' && DigitRun(s, j + 1) == 2) {
    std::size_t end = j + 3;
    if (end < s.size() && s[end] == ':' && DigitRun(s, end + 1) == 2) end += 3;
    if (!boundary_after(end) || (end < s.size() && s[end] == ':')) return 0;
    std::size_t k = end;
    while (k < s.size() && s[k] == ' ') ++k;
    if (k + 2 <= s.size()) {
      std::string_view suffix = s.substr(k, 2);
      if ((EqualsIgnoreCase(suffix, "am") || EqualsIgnoreCase(suffix, "pm")) &&
          boundary_after(k + 2)) {
        end = k + 2;
      }
    }
    return end - i;
  }
  return 0;
}

std::string DropDateTimes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    bool at_boundary = i == 0 || !IsAlnum(s[i - 1]);
    if (at_boundary && IsDigit(s[i])) {
      if (std::size_t n = MatchDateTime(s, i); n > 0) {
        out.push_back(' ');
        i += n;
        continue;
      }
      // Skip the whole digit run so its tail is never a match start.
      std::size_t n = DigitRun(s, i);
      out.append(s.substr(i, n));
      i += n;
      continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

// Inline all-uppercase heading ("... IMPRESSION: ...") starting at i; returns
// the length through the colon, or 0.
std::size_t MatchInlineHeading(std::string_view s, std::size_t i) {
  if (!IsUpper(s[i]) || (i > 0 && IsAlnum(s[i - 1]))) return 0;
  std::size_t j = i;
  while (j < s.size() && (IsUpper(s[j]) || s[j] == ' ' || s[j] == '/')) ++j;
  if (j >= s.size() || s[j] != ':') return 0;
  std::string_view run = Trim(s.substr(i, j - i));
  if (run.size() < 2 || !IsUpper(run.back())) return 0;
  return j + 1 - i;
}

std::string DropHeadings(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t line_begin = 0;
  while (line_begin <= s.size()) {
    std::size_t nl = s.find('\n', line_begin);
    std::size_t line_end = nl == std::string_view::npos ? s.size() : nl;
    std::string_view line = s.substr(line_begin, line_end - line_begin);
    std::size_t i = 0;
    if (auto h = MatchHeaderLine(line)) {
      out.push_back(' ');
      i = h->after_colon;
    }
    while (i < line.size()) {
      if (std::size_t n = MatchInlineHeading(line, i); n > 0) {
        out.push_back(' ');
        i += n;
        continue;
      }
      // Advance past an uppercase run so inner letters are not restarts.
      if (IsUpper(line[i])) {
        std::size_t j = i;
        while (j < line.size() && IsAlnum(line[j])) ++j;
        out.append(line.substr(i, j - i));
        i = j;
        continue;
      }
      out.push_back(line[i]);
      ++i;
    }
    if (nl == std::string_view::npos) break;
    out.push_back('\n');
    line_begin = nl + 1;
  }
  return out;
}

bool IsBulletToken(std::string_view tok) {
  if (tok.size() < 2) return false;
  char last = tok.back();
  if (last != '.' && last != ')') return false;
  return std::all_of(tok.begin(), tok.end() - 1, IsDigit);
}

// Collapses whitespace and drops bullet tokens that are followed by more text.
std::string CollapseAndDropBullets(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !IsSpace(s[j])) ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  std::string out;
  out.reserve(s.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (t + 1 < tokens.size() && IsBulletToken(tokens[t])) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(tokens[t]);
  }
  return out;
}

std::string CleanOnce(std::string_view s) {
  std::string x = DropIllegal(s);
  x = DropPlaceholders(x);
  x = DropDateTimes(x);
  x = DropHeadings(x);
  return CollapseAndDropBullets(x);
}

}  // namespace

const Section* SectionedReport::Find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::optional<HeaderMatch> MatchHeaderLine(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && IsSpace(line[i])) ++i;
  if (i >= line.size() || !IsAlpha(line[i])) return std::nullopt;
  std::size_t j = i;
  while (j < line.size() &&
         (IsAlpha(line[j]) || line[j] == ' ' || line[j] == '\t' || line[j] == '/')) {
    ++j;
  }
  if (j >= line.size() || line[j] != ':') return std::nullopt;
  std::string name = CanonicalName(line.substr(i, j - i));
  if (name.size() < 2) return std::nullopt;
  return HeaderMatch{std::move(name), i, j + 1};
}

bool IsBackgroundSection(std::string_view name) {
  return Contains(kBackgroundAliases, name);
}

SectionedReport DetectSections(const RawReport& report) {
  const std::string& text = report.text;
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kNoSectionsFound, "report '" + report.id + "' is blank");
  }
  SectionedReport out;
  out.id = report.id;

  bool open = false;
  std::size_t body_begin = 0;
  auto close_at = [&](std::size_t pos) {
    if (!open) return;
    std::size_t b = body_begin;
    std::size_t e = pos;
    while (b < e && IsSpace(text[b])) ++b;
    while (e > b && IsSpace(text[e - 1])) --e;
    Section& s = out.sections.back();
    s.start = b;
    s.end = e;
    s.body = text.substr(b, e - b);
    open = false;
  };

  std::size_t line_begin = 0;
  while (line_begin < text.size()) {
    std::size_t nl = text.find('\n', line_begin);
    std::size_t line_end = nl == std::string::npos ? text.size() : nl;
    std::string_view line(text.data() + line_begin, line_end - line_begin);
    if (IsBannerLine(line)) {
      close_at(line_begin);
      if (CanonicalName(Trim(line)) == "FINAL REPORT") {
        out.has_final_report_marker = true;
      }
    } else if (auto h = MatchHeaderLine(line)) {
      close_at(line_begin);
      Section s;
      s.name = std::move(h->name);
      s.header_start = line_begin + h->name_begin;
      s.in_final_report = out.has_final_report_marker;
      out.sections.push_back(std::move(s));
      body_begin = line_begin + h->after_colon;
      open = true;
    }
    if (nl == std::string::npos) break;
    line_begin = nl + 1;
  }
  close_at(text.size());

  if (out.sections.empty()) {
    throw Error(ErrorCode::kNoSectionsFound,
                "report '" + report.id + "' has no section headers");
  }
  return out;
}

std::string CleanText(std::string_view body) {
  std::string current = CleanOnce(body);
  // Each pass only deletes material, so this converges quickly.
  for (int i = 0; i < 32; ++i) {
    std::string next = CleanOnce(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

SummPair MakeSummPair(const SectionedReport& report, bool include_background) {
  const Section* impression = report.Find("IMPRESSION");
  std::string target = impression ? CleanText(impression->body) : std::string();
  if (target.empty()) {
    throw Error(ErrorCode::kMissingImpression,
                "report '" + report.id + "' has no usable IMPRESSION");
  }
  const Section* findings = report.Find("FINDINGS");
  std::string input = findings ? CleanText(findings->body) : std::string();
  if (input.empty()) {
    throw Error(ErrorCode::kMissingFindings,
                "report '" + report.id + "' has no usable FINDINGS");
  }
  if (include_background) {
    for (const auto& s : report.sections) {
      if (!IsBackgroundSection(s.name)) continue;
      std::string background = CleanText(s.body);
      if (background.empty()) continue;
      input = background + " " + input;
      break;
    }
  }
  return SummPair{report.id, std::move(input), std::move(target)};
}

bool IsRetainedSection(const SectionedReport& report, const Section& section) {
  if (report.has_final_report_marker) {
    return section.in_final_report || Contains(kPreBannerRetained, section.name);
  }
  return !Contains(kAdministrative, section.name);
}

std::string MakeRetrainText(const SectionedReport& report) {
  std::string out;
  for (const auto& s : report.sections) {
    if (!IsRetainedSection(report, s)) continue;
    std::string body = CleanText(s.body);
    if (body.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += body;
  }
  if (out.empty()) {
    throw Error(ErrorCode::kNoRetainedSections,
                "report '" + report.id + "' has no retained section text");
  }
  return out;
}

}  // namespace radsum
