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

#include "vani/dsp/fft.h"

#include <cmath>

#include "vani/util/error.h"

namespace vani {

void Fft(std::vector<std::complex<double>>* a, bool inverse) {
  size_t n = a->size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error("FFT size must be a power of two");
  auto& v = *a;

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = v[i + k];
        std::complex<double> t = v[i + k + len / 2] * w;
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    double scale = 1.0 / static_cast<double>(n);
    for (auto& c : v) c *= scale;
  }
}

std::vector<std::complex<double>> RealFft(const std::vector<double>& x, int n) {
  std::vector<std::complex<double>> a(n);
  size_t copy = std::min<size_t>(x.size(), n);
  for (size_t i = 0; i < copy; ++i) a[i] = x[i];
  Fft(&a, false);
  return a;
}

}  // namespace vani
