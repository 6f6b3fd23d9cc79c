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

#ifndef VANI_DSP_FEATURES_H_
#define VANI_DSP_FEATURES_H_

#include <filesystem>
#include <span>
#include <vector>

#include "vani/dsp/dsp.h"
#include "vani/manifest.h"
#include "vani/util/mat.h"

namespace vani {

// Aligned per-clip features: log mel (n_mels x F), F0 and energy (length F).
struct MelFeatures {
  Mat<float> mel;
  std::vector<float> f0_hz;
  std::vector<float> energy;
  float hop_s = 0.0f;
  int sample_rate_hz = 0;

  int n_frames() const { return mel.cols; }

  bool operator==(const MelFeatures&) const = default;
};

MelFeatures ExtractFeatures(const Waveform& w, const DspConfig& cfg);

// Flat binary layout: "VANI" magic, u32 version, u32 n_mels, u32 F,
// f32 hop_s, u32 sample_rate, then f32 mel row-major, f0, energy.
void SaveFeatures(const MelFeatures& feats, const std::filesystem::path& path);
MelFeatures LoadFeatures(const std::filesystem::path& path);

// Canonical "0.875"-style rendering used in speaker/clip suffixes.
std::string FormatScale(double scale);

// Writes formant-warped copies of every clip for each scale and returns the
// manifest extended with the synthetic speakers ("<speaker>@fs<scale>").
DatasetManifest AugmentManifest(const DatasetManifest& m,
                                std::span<const double> scales,
                                const DspConfig& cfg,
                                const std::filesystem::path& out_audio_dir,
                                int threads = 1,
                                std::vector<std::string>* skipped = nullptr);

}  // namespace vani

#endif  // VANI_DSP_FEATURES_H_
