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

#ifndef VANI_DSP_DSP_H_
#define VANI_DSP_DSP_H_

#include "vani/dsp/wav.h"

namespace vani {

struct DspConfig {
  int sample_rate_hz = 22050;
  int n_fft = 1024;
  int hop = 256;
  int win = 1024;
  int n_mels = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double trim_threshold_db = 50.0;  // relative to the loudest frame
  double pad_s = 0.2;
  double f0_min_hz = 65.0;
  double f0_max_hz = 800.0;
  // Must resolve formant bandwidths (order 60 tracks ~180 Hz at 22.05 kHz)
  // while staying below the pitch comb quefrency (sr / f0).
  int cepstral_order = 60;
  int griffin_lim_iters = 60;

  void Validate() const;
};

// Scales the waveform so the peak absolute amplitude is 0.95.
Waveform NormalizeVolume(const Waveform& w);

// Cuts leading/trailing frames whose RMS is more than trim_threshold_db
// below the loudest frame, then pads both ends with round(pad_s * sr)
// zeros. Framing is plain (win, hop), not centered.
Waveform TrimSilence(const Waveform& w, const DspConfig& cfg);

}  // namespace vani

#endif  // VANI_DSP_DSP_H_
