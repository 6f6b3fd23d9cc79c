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

#ifndef VANI_UTIL_NUMERIC_H_
#define VANI_UTIL_NUMERIC_H_

#include <cstddef>
#include <span>

namespace vani {

// Pairwise summation; error grows as O(log n) rather than O(n).
template <typename T>
double PairwiseSum(std::span<const T> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (T v : x) s += static_cast<double>(v);
    return s;
  }
  size_t mid = x.size() / 2;
  return PairwiseSum(x.first(mid)) + PairwiseSum(x.subspan(mid));
}

}  // namespace vani

#endif  // VANI_UTIL_NUMERIC_H_
