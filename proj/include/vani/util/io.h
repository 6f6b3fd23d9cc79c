// Copyright 2026 The VANI Project Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VANI_UTIL_IO_H_
#define VANI_UTIL_IO_H_

#include <filesystem>
#include <string>
#include <vector>

namespace vani {

std::string ReadTextFile(const std::filesystem::path& path);

// Writes to a temp file in the same directory, then renames over the target.
void AtomicWriteFile(const std::filesystem::path& path,
                     const std::string& content);

// Splits on '\n'; a trailing newline does not yield an extra empty line.
std::vector<std::string> SplitLines(const std::string& text);

}  // namespace vani

#endif  // VANI_UTIL_IO_H_
