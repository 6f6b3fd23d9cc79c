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

#ifndef VANI_DSP_FFT_H_
#define VANI_DSP_FFT_H_

#include <complex>
#include <vector>

namespace vani {

// In-place iterative radix-2 FFT; a.size() must be a power of two.
// inverse applies the 1/N scale.
void Fft(std::vector<std::complex<double>>* a, bool inverse);

// Full complex spectrum of a real signal zero-padded to n (power of two).
std::vector<std::complex<double>> RealFft(const std::vector<double>& x, int n);

}  // namespace vani

#endif  // VANI_DSP_FFT_H_
