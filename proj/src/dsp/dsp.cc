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

#include "vani/dsp/dsp.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vani/util/error.h"

namespace vani {

void DspConfig::Validate() const {
  if (sample_rate_hz <= 0) throw Error("sample_rate_hz must be positive");
  if (!(hop > 0 && hop <= win && win <= n_fft))
    throw Error("require 0 < hop <= win <= n_fft");
  if ((n_fft & (n_fft - 1)) != 0) throw Error("n_fft must be a power of two");
  if (fmax_hz > sample_rate_hz / 2.0)
    throw Error("fmax_hz must not exceed Nyquist");
  if (n_mels <= 0) throw Error("n_mels must be positive");
  if (!(f0_min_hz > 0 && f0_min_hz < f0_max_hz))
    throw Error("require 0 < f0_min_hz < f0_max_hz");
  if (cepstral_order <= 0 || cepstral_order >= n_fft / 2)
    throw Error("cepstral_order must be in (0, n_fft/2)");
}

Waveform NormalizeVolume(const Waveform& w) {
  float peak = 0.0f;
  for (float s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak <= 0.0f) throw Error("cannot normalize an all-zero signal");
  Waveform out = w;
  float gain = 0.95f / peak;
  for (float& s : out.samples) s *= gain;
  return out;
}

Waveform TrimSilence(const Waveform& w, const DspConfig& cfg) {
  cfg.Validate();
  const auto& x = w.samples;
  size_t len = x.size();
  size_t win = static_cast<size_t>(cfg.win);
  size_t hop = static_cast<size_t>(cfg.hop);
  size_t n_frames = len < win ? 1 : 1 + (len - win) / hop;

  std::vector<double> rms_db(n_frames);
  double max_db = -1e30;
  for (size_t f = 0; f < n_frames; ++f) {
    size_t start = f * hop;
    size_t end = std::min(len, start + win);
    double acc = 0.0;
    for (size_t i = start; i < end; ++i)
      acc += static_cast<double>(x[i]) * x[i];
    double mean = end > start ? acc / static_cast<double>(end - start) : 0.0;
    rms_db[f] = 10.0 * std::log10(mean + 1e-12);
    max_db = std::max(max_db, rms_db[f]);
  }

  // The relative threshold alone would label everything non-silent in a
  // digitally silent file, so an absolute floor backs it up.
  constexpr double kAbsFloorDb = -80.0;
  double threshold = max_db - cfg.trim_threshold_db;
  size_t first = n_frames, last = n_frames;
  for (size_t f = 0; f < n_frames; ++f) {
    if (rms_db[f] > threshold && rms_db[f] > kAbsFloorDb) {
      if (first == n_frames) first = f;
      last = f;
    }
  }
  if (first == n_frames) throw Error("no non-silent frames found");

  // A silent frame before `first` covers [first*hop - hop, first*hop - hop
  // + win), so the content cannot start before first*hop + win - hop; the
  // silent frame after `last` bounds the end at last*hop + hop. Cutting
  // there keeps each boundary within one hop of the true edge.
  size_t start = first == 0 ? 0 : first * hop + (win - hop);
  size_t end = last + 1 >= n_frames ? len : std::min(len, last * hop + hop);
  if (start >= end) {
    start = first * hop;
    end = std::min(len, last * hop + win);
  }
  size_t pad =
      static_cast<size_t>(std::llround(cfg.pad_s * cfg.sample_rate_hz));

  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.assign(pad, 0.0f);
  out.samples.insert(out.samples.end(), x.begin() + start, x.begin() + end);
  out.samples.insert(out.samples.end(), pad, 0.0f);
  return out;
}

}  // namespace vani
