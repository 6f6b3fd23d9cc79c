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

#ifndef VANI_DSP_PITCH_H_
#define VANI_DSP_PITCH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "vani/dsp/dsp.h"

namespace vani {

struct PitchTrack {
  std::vector<float> f0_hz;     // 0 where unvoiced
  std::vector<uint8_t> voiced;  // same length

  int n_frames() const { return static_cast<int>(f0_hz.size()); }
};

// YIN on the mel frame grid (centered frames, same hop): cumulative-mean
// normalized difference, absolute threshold 0.15, parabolic interpolation.
PitchTrack ExtractF0(std::span<const float> x, const DspConfig& cfg);

}  // namespace vani

#endif  // VANI_DSP_PITCH_H_
