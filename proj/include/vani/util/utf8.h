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

#ifndef VANI_UTIL_UTF8_H_
#define VANI_UTIL_UTF8_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vani {

// Decodes UTF-8 into unicode scalar values. Invalid byte sequences decode
// to U+FFFD so that text operations stay total.
std::vector<uint32_t> DecodeUtf8(std::string_view s);

std::string EncodeUtf8(const std::vector<uint32_t>& cps);

// Number of unicode scalar values in s.
size_t CodepointCount(std::string_view s);

}  // namespace vani

#endif  // VANI_UTIL_UTF8_H_
