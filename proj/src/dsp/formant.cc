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

#include "vani/dsp/formant.h"

#include <algorithm>
#include <cmath>

#include "vani/dsp/fft.h"
#include "vani/dsp/stft.h"
#include "vani/util/error.h"

namespace vani {

std::vector<double> CepstralEnvelope(std::span<const double> log_mag,
                                     int n_fft, int order) {
  int n_bins = n_fft / 2 + 1;
  if (static_cast<int>(log_mag.size()) != n_bins)
    throw Error("log spectrum size mismatch");

  // Symmetric extension -> real even cepstrum.
  std::vector<std::complex<double>> buf(n_fft);
  for (int k = 0; k < n_bins; ++k) buf[k] = log_mag[k];
  for (int k = 1; k < n_fft / 2; ++k) buf[n_fft - k] = log_mag[k];
  Fft(&buf, true);

  // Lifter: keep low quefrencies (and their mirror) only.
  for (int q = order + 1; q <= n_fft - order - 1; ++q) buf[q] = 0.0;
  for (int q = 0; q < n_fft; ++q) buf[q] = std::complex<double>(buf[q].real(), 0.0);
  Fft(&buf, false);

  std::vector<double> env(n_bins);
  for (int k = 0; k < n_bins; ++k) env[k] = buf[k].real();
  return env;
}

Waveform FormantScale(const Waveform& w, double alpha, const DspConfig& cfg) {
  cfg.Validate();
  if (!(alpha >= 0.5 && alpha <= 2.0))
    throw Error("formant scale must lie in [0.5, 2.0]");
  if (w.samples.size() < static_cast<size_t>(cfg.win))
    throw Error("signal shorter than one analysis window");

  Spectrogram spec = Stft(std::span<const float>(w.samples), cfg);
  int n_bins = spec.n_bins;

  std::vector<double> log_mag(n_bins);
  for (auto& frame : spec.frames) {
    for (int k = 0; k < n_bins; ++k)
      log_mag[k] = std::log(std::max(std::abs(frame[k]), 1e-10));
    std::vector<double> env = CepstralEnvelope(log_mag, cfg.n_fft,
                                               cfg.cepstral_order);
    // E'(f) = E(f / alpha), clamped at the top of the spectrum.
    for (int k = 0; k < n_bins; ++k) {
      double src = k / alpha;
      double warped;
      if (src >= n_bins - 1) {
        warped = env[n_bins - 1];
      } else {
        int lo = static_cast<int>(src);
        double frac = src - lo;
        warped = env[lo] * (1.0 - frac) + env[lo + 1] * frac;
      }
      double residual = log_mag[k] - env[k];
      double new_mag = std::exp(warped + residual);
      double old_mag = std::abs(frame[k]);
      frame[k] = old_mag > 1e-12
                     ? frame[k] / old_mag * new_mag
                     : std::complex<double>(new_mag, 0.0);
    }
  }

  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples = Istft(spec, cfg, w.samples.size());
  return out;
}

}  // namespace vani
