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

#ifndef VANI_DSP_STFT_H_
#define VANI_DSP_STFT_H_

#include <complex>
#include <span>
#include <vector>

#include "vani/dsp/dsp.h"
#include "vani/util/mat.h"

namespace vani {

// Frame-major complex spectrum: frames[t][k], k in [0, n_fft/2].
struct Spectrogram {
  int n_bins = 0;
  std::vector<std::vector<std::complex<double>>> frames;

  int n_frames() const { return static_cast<int>(frames.size()); }
};

// Periodic Hann window.
std::vector<double> HannWindow(int n);

// Centered STFT with zero padding; F = 1 + floor(len / hop).
Spectrogram Stft(std::span<const float> x, const DspConfig& cfg);

// Weighted overlap-add inverse of Stft. out_len trims/limits the result.
std::vector<float> Istft(const Spectrogram& spec, const DspConfig& cfg,
                         size_t out_len);

// Triangular filters on the Slaney mel scale with area normalization.
class MelFilterbank {
 public:
  explicit MelFilterbank(const DspConfig& cfg);

  int n_mels() const { return n_mels_; }
  int n_bins() const { return n_bins_; }
  double CenterFreqHz(int mel_channel) const;

  // Filterbank applied to one magnitude spectrum.
  std::vector<double> Apply(std::span<const std::complex<double>> frame) const;

  // Least-squares pseudo-inverse, clamped to non-negative magnitudes.
  std::vector<double> Invert(std::span<const double> mel_energies) const;

 private:
  int n_mels_;
  int n_bins_;
  std::vector<double> weights_;      // n_mels x n_bins
  std::vector<double> pinv_;         // n_bins x n_mels
  std::vector<double> center_hz_;
};

// Log mel spectrogram, natural log with floor 1e-5. Rows are mel channels,
// columns are frames. Throws when the signal is shorter than one window.
Mat<float> MelSpectrogram(std::span<const float> x, const DspConfig& cfg);

// Per-frame mean over mel channels.
std::vector<float> ExtractEnergy(const Mat<float>& mel);

// Phase-recovery inversion of a log mel spectrogram. If convergence is
// non-null it receives the final spectral convergence value.
Waveform GriffinLim(const Mat<float>& mel, const DspConfig& cfg,
                    double* convergence = nullptr);

}  // namespace vani

#endif  // VANI_DSP_STFT_H_
