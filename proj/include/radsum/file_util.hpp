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

#ifndef RADSUM_FILE_UTIL_HPP_
#define RADSUM_FILE_UTIL_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace radsum {

// Whole-file read; throws Error(kIoError).
std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary and renames it into place, so readers never
// observe a half-written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace radsum

#endif  // RADSUM_FILE_UTIL_HPP_
