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

#ifndef VANI_DSP_WAV_H_
#define VANI_DSP_WAV_H_

#include <filesystem>
#include <vector>

namespace vani {

struct Waveform {
  std::vector<float> samples;  // [-1, 1]
  int sample_rate_hz = 22050;

  double DurationSeconds() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

enum class WavFormat { kPcm16, kFloat32 };

// Mono 16-bit PCM or 32-bit float RIFF files. An empty data chunk yields an
// empty sample vector (the curation stage drops such clips).
Waveform ReadWav(const std::filesystem::path& path);

void WriteWav(const Waveform& w, const std::filesystem::path& path,
              WavFormat format = WavFormat::kPcm16);

// Sample count without decoding the payload; -1 if the file is unreadable.
int64_t ProbeWavSamples(const std::filesystem::path& path);

}  // namespace vani

#endif  // VANI_DSP_WAV_H_
