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

#ifndef VANI_UTIL_MAT_H_
#define VANI_UTIL_MAT_H_

#include <cassert>
#include <cstddef>
#include <vector>

namespace vani {

// Dense row-major matrix. Column vectors are Mat(n, 1).
template <typename T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, T(0)) {}

  T& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  const T& operator()(int r, int c) const {
    return v[static_cast<size_t>(r) * cols + c];
  }

  size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }

  bool SameShape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

  bool operator==(const Mat& o) const = default;

  template <typename U>
  Mat<U> Cast() const {
    Mat<U> out(rows, cols);
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }
};

}  // namespace vani

#endif  // VANI_UTIL_MAT_H_
