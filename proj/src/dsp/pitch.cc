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

#include "vani/dsp/pitch.h"

#include <algorithm>
#include <cmath>

#include "vani/util/error.h"

namespace vani {

namespace {

constexpr double kYinThreshold = 0.15;

// One YIN estimate over `frame`; integration window is frame.size()/2.
// Returns 0 when unvoiced.
double YinFrame(std::span<const double> frame, const DspConfig& cfg) {
  int half = static_cast<int>(frame.size()) / 2;
  int tau_min = std::max(
      2, static_cast<int>(cfg.sample_rate_hz / cfg.f0_max_hz));
  int tau_max = std::min(
      half - 1, static_cast<int>(std::ceil(cfg.sample_rate_hz / cfg.f0_min_hz)));
  if (tau_max <= tau_min) return 0.0;

  // Squared difference function.
  std::vector<double> d(tau_max + 1, 0.0);
  for (int tau = 1; tau <= tau_max; ++tau) {
    double acc = 0.0;
    for (int j = 0; j < half; ++j) {
      double delta = frame[j] - frame[j + tau];
      acc += delta * delta;
    }
    d[tau] = acc;
  }

  // Cumulative-mean normalization.
  std::vector<double> cmnd(tau_max + 1, 1.0);
  double running = 0.0;
  for (int tau = 1; tau <= tau_max; ++tau) {
    running += d[tau];
    cmnd[tau] = running > 0.0 ? d[tau] * tau / running : 1.0;
  }

  // First dip under the threshold; follow it to its local minimum.
  int tau = -1;
  for (int t = tau_min; t <= tau_max; ++t) {
    if (cmnd[t] < kYinThreshold) {
      while (t + 1 <= tau_max && cmnd[t + 1] < cmnd[t]) ++t;
      tau = t;
      break;
    }
  }
  if (tau < 0) return 0.0;

  // Parabolic interpolation around the minimum.
  double better = tau;
  if (tau > 1 && tau < tau_max) {
    double s0 = cmnd[tau - 1], s1 = cmnd[tau], s2 = cmnd[tau + 1];
    double denom = 2.0 * (2.0 * s1 - s2 - s0);
    if (std::abs(denom) > 1e-12) better = tau + (s2 - s0) / denom;
  }
  if (better <= 0.0) return 0.0;
  double f0 = cfg.sample_rate_hz / better;
  if (f0 < cfg.f0_min_hz || f0 > cfg.f0_max_hz) return 0.0;
  return f0;
}

}  // namespace

PitchTrack ExtractF0(std::span<const float> x, const DspConfig& cfg) {
  cfg.Validate();
  int n_frames = 1 + static_cast<int>(x.size()) / cfg.hop;
  int win = cfg.win;
  int half_window = win / 2;

  PitchTrack track;
  track.f0_hz.resize(n_frames, 0.0f);
  track.voiced.resize(n_frames, 0);

  std::vector<double> frame(win);
  for (int t = 0; t < n_frames; ++t) {
    int64_t start = static_cast<int64_t>(t) * cfg.hop - half_window;
    for (int i = 0; i < win; ++i) {
      int64_t idx = start + i;
      frame[i] = (idx >= 0 && idx < static_cast<int64_t>(x.size()))
                     ? static_cast<double>(x[idx])
                     : 0.0;
    }
    double f0 = YinFrame(frame, cfg);
    if (f0 > 0.0) {
      track.f0_hz[t] = static_cast<float>(f0);
      track.voiced[t] = 1;
    }
  }
  return track;
}

}  // namespace vani
