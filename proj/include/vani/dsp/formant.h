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

#ifndef VANI_DSP_FORMANT_H_
#define VANI_DSP_FORMANT_H_

#include <span>
#include <vector>

#include "vani/dsp/dsp.h"

namespace vani {

// Cepstrally smoothed spectral envelope of one log-magnitude half spectrum
// (n_fft/2 + 1 bins): quefrencies above `order` are zeroed.
std::vector<double> CepstralEnvelope(std::span<const double> log_mag,
                                     int n_fft, int order);

// Warps the spectral-envelope frequency axis by `alpha` while keeping the
// excitation residual and phase untouched, so formants move by the factor
// alpha and the pitch stays put. Output length equals input length.
Waveform FormantScale(const Waveform& w, double alpha, const DspConfig& cfg);

}  // namespace vani

#endif  // VANI_DSP_FORMANT_H_
