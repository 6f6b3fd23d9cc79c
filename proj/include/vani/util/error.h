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

#ifndef VANI_UTIL_ERROR_H_
#define VANI_UTIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace vani {

// Data/contract violations raised by library operations. The CLI maps these
// to exit code 2; usage problems are handled by the argument parser.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vani

#endif  // VANI_UTIL_ERROR_H_
