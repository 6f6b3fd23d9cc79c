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

#include "vani/dsp/stft.h"

#include <algorithm>
#include <cmath>

#include "vani/dsp/fft.h"
#include "vani/util/error.h"
#include "vani/util/rng.h"

namespace vani {

namespace {

constexpr double kLogFloor = 1e-5;

// Window of length win placed centered inside an n_fft buffer.
std::vector<double> PaddedWindow(const DspConfig& cfg) {
  std::vector<double> w(cfg.n_fft, 0.0);
  std::vector<double> h = HannWindow(cfg.win);
  int offset = (cfg.n_fft - cfg.win) / 2;
  for (int i = 0; i < cfg.win; ++i) w[offset + i] = h[i];
  return w;
}

double HzToMelSlaney(double hz) {
  constexpr double kFSp = 200.0 / 3.0;
  constexpr double kMinLogHz = 1000.0;
  constexpr double kMinLogMel = kMinLogHz / kFSp;
  const double log_step = std::log(6.4) / 27.0;
  if (hz < kMinLogHz) return hz / kFSp;
  return kMinLogMel + std::log(hz / kMinLogHz) / log_step;
}

double MelToHzSlaney(double mel) {
  constexpr double kFSp = 200.0 / 3.0;
  constexpr double kMinLogHz = 1000.0;
  constexpr double kMinLogMel = kMinLogHz / kFSp;
  const double log_step = std::log(6.4) / 27.0;
  if (mel < kMinLogMel) return mel * kFSp;
  return kMinLogHz * std::exp(log_step * (mel - kMinLogMel));
}

// Cholesky solve of (A)X = B for SPD A (n x n), B n x m, X overwrites B.
void CholeskySolve(std::vector<double>& a, std::vector<double>& b, int n,
                   int m) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw Error("mel filterbank Gram matrix not SPD");
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  // Forward then backward substitution per column of B.
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < n; ++i) {
      double s = b[i * m + c];
      for (int k = 0; k < i; ++k) s -= a[i * n + k] * b[k * m + c];
      b[i * m + c] = s / a[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = b[i * m + c];
      for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k * m + c];
      b[i * m + c] = s / a[i * n + i];
    }
  }
}

}  // namespace

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

Spectrogram Stft(std::span<const float> x, const DspConfig& cfg) {
  cfg.Validate();
  if (x.size() < static_cast<size_t>(cfg.win))
    throw Error("signal shorter than one analysis window");
  std::vector<double> window = PaddedWindow(cfg);
  int m = cfg.n_fft;
  int half = m / 2;
  int n_frames = 1 + static_cast<int>(x.size()) / cfg.hop;

  Spectrogram spec;
  spec.n_bins = half + 1;
  spec.frames.resize(n_frames);
  std::vector<std::complex<double>> buf(m);
  for (int t = 0; t < n_frames; ++t) {
    int64_t start = static_cast<int64_t>(t) * cfg.hop - half;
    for (int i = 0; i < m; ++i) {
      int64_t idx = start + i;
      double s = (idx >= 0 && idx < static_cast<int64_t>(x.size()))
                     ? static_cast<double>(x[idx])
                     : 0.0;
      buf[i] = s * window[i];
    }
    Fft(&buf, false);
    spec.frames[t].assign(buf.begin(), buf.begin() + spec.n_bins);
  }
  return spec;
}

std::vector<float> Istft(const Spectrogram& spec, const DspConfig& cfg,
                         size_t out_len) {
  cfg.Validate();
  std::vector<double> window = PaddedWindow(cfg);
  int m = cfg.n_fft;
  int half = m / 2;
  int n_frames = spec.n_frames();

  std::vector<double> num(static_cast<size_t>(n_frames - 1) * cfg.hop + m, 0.0);
  std::vector<double> den(num.size(), 0.0);
  std::vector<std::complex<double>> buf(m);
  for (int t = 0; t < n_frames; ++t) {
    const auto& fr = spec.frames[t];
    for (int k = 0; k <= half; ++k) buf[k] = fr[k];
    for (int k = 1; k < half; ++k) buf[m - k] = std::conj(fr[k]);
    Fft(&buf, true);
    size_t pos = static_cast<size_t>(t) * cfg.hop;
    for (int i = 0; i < m; ++i) {
      num[pos + i] += window[i] * buf[i].real();
      den[pos + i] += window[i] * window[i];
    }
  }

  std::vector<float> out(out_len, 0.0f);
  for (size_t s = 0; s < out_len; ++s) {
    size_t idx = s + half;
    if (idx < num.size() && den[idx] > 1e-9)
      out[s] = static_cast<float>(num[idx] / den[idx]);
  }
  return out;
}

MelFilterbank::MelFilterbank(const DspConfig& cfg)
    : n_mels_(cfg.n_mels), n_bins_(cfg.n_fft / 2 + 1) {
  double mel_lo = HzToMelSlaney(cfg.fmin_hz);
  double mel_hi = HzToMelSlaney(cfg.fmax_hz);
  std::vector<double> hz_points(n_mels_ + 2);
  for (int i = 0; i < n_mels_ + 2; ++i)
    hz_points[i] =
        MelToHzSlaney(mel_lo + (mel_hi - mel_lo) * i / (n_mels_ + 1));
  center_hz_.assign(hz_points.begin() + 1, hz_points.end() - 1);

  weights_.assign(static_cast<size_t>(n_mels_) * n_bins_, 0.0);
  double hz_per_bin = static_cast<double>(cfg.sample_rate_hz) / cfg.n_fft;
  for (int f = 0; f < n_mels_; ++f) {
    double lo = hz_points[f], center = hz_points[f + 1], hi = hz_points[f + 2];
    double enorm = 2.0 / (hi - lo);
    for (int k = 0; k < n_bins_; ++k) {
      double hz = k * hz_per_bin;
      double v = 0.0;
      if (hz >= lo && hz <= center && center > lo)
        v = (hz - lo) / (center - lo);
      else if (hz > center && hz < hi)
        v = (hi - hz) / (hi - center);
      weights_[static_cast<size_t>(f) * n_bins_ + k] = v * enorm;
    }
  }

  // P = W^T (W W^T + eps I)^-1, stored n_bins x n_mels.
  std::vector<double> gram(static_cast<size_t>(n_mels_) * n_mels_, 0.0);
  for (int i = 0; i < n_mels_; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < n_bins_; ++k)
        s += weights_[static_cast<size_t>(i) * n_bins_ + k] *
             weights_[static_cast<size_t>(j) * n_bins_ + k];
      gram[static_cast<size_t>(i) * n_mels_ + j] = s;
      gram[static_cast<size_t>(j) * n_mels_ + i] = s;
    }
  for (int i = 0; i < n_mels_; ++i)
    gram[static_cast<size_t>(i) * n_mels_ + i] += 1e-10;
  // Solve gram * X = W, X is n_mels x n_bins; then P = X^T.
  std::vector<double> rhs = weights_;
  CholeskySolve(gram, rhs, n_mels_, n_bins_);
  pinv_.assign(static_cast<size_t>(n_bins_) * n_mels_, 0.0);
  for (int i = 0; i < n_mels_; ++i)
    for (int k = 0; k < n_bins_; ++k)
      pinv_[static_cast<size_t>(k) * n_mels_ + i] =
          rhs[static_cast<size_t>(i) * n_bins_ + k];
}

double MelFilterbank::CenterFreqHz(int mel_channel) const {
  return center_hz_.at(mel_channel);
}

std::vector<double> MelFilterbank::Apply(
    std::span<const std::complex<double>> frame) const {
  std::vector<double> mag(n_bins_);
  for (int k = 0; k < n_bins_; ++k) mag[k] = std::abs(frame[k]);
  std::vector<double> out(n_mels_, 0.0);
  for (int f = 0; f < n_mels_; ++f) {
    double s = 0.0;
    const double* row = &weights_[static_cast<size_t>(f) * n_bins_];
    for (int k = 0; k < n_bins_; ++k) s += row[k] * mag[k];
    out[f] = s;
  }
  return out;
}

std::vector<double> MelFilterbank::Invert(
    std::span<const double> mel_energies) const {
  std::vector<double> mag(n_bins_, 0.0);
  for (int k = 0; k < n_bins_; ++k) {
    double s = 0.0;
    const double* row = &pinv_[static_cast<size_t>(k) * n_mels_];
    for (int f = 0; f < n_mels_; ++f) s += row[f] * mel_energies[f];
    mag[k] = std::max(0.0, s);
  }
  return mag;
}

Mat<float> MelSpectrogram(std::span<const float> x, const DspConfig& cfg) {
  Spectrogram spec = Stft(x, cfg);
  MelFilterbank fb(cfg);
  Mat<float> mel(cfg.n_mels, spec.n_frames());
  for (int t = 0; t < spec.n_frames(); ++t) {
    std::vector<double> e = fb.Apply(spec.frames[t]);
    for (int f = 0; f < cfg.n_mels; ++f)
      mel(f, t) = static_cast<float>(std::log(std::max(e[f], kLogFloor)));
  }
  return mel;
}

std::vector<float> ExtractEnergy(const Mat<float>& mel) {
  if (mel.empty()) throw Error("cannot take energy of an empty mel matrix");
  std::vector<float> energy(mel.cols);
  for (int t = 0; t < mel.cols; ++t) {
    double s = 0.0;
    for (int f = 0; f < mel.rows; ++f) s += mel(f, t);
    energy[t] = static_cast<float>(s / mel.rows);
  }
  return energy;
}

Waveform GriffinLim(const Mat<float>& mel, const DspConfig& cfg,
                    double* convergence) {
  cfg.Validate();
  MelFilterbank fb(cfg);
  int n_frames = mel.cols;
  int n_bins = fb.n_bins();
  if (mel.rows != cfg.n_mels) throw Error("mel channel count mismatch");
  if (n_frames < 1) throw Error("empty mel spectrogram");

  // Target linear magnitudes from the log mel input.
  std::vector<std::vector<double>> target(n_frames);
  double target_norm_sq = 0.0;
  for (int t = 0; t < n_frames; ++t) {
    std::vector<double> e(cfg.n_mels);
    for (int f = 0; f < cfg.n_mels; ++f)
      e[f] = std::exp(static_cast<double>(mel(f, t)));
    target[t] = fb.Invert(e);
    for (double v : target[t]) target_norm_sq += v * v;
  }

  size_t out_len = static_cast<size_t>(n_frames - 1) * cfg.hop;
  if (out_len == 0) out_len = cfg.hop;

  // Accelerated Griffin-Lim: seeded random initial phase and momentum on
  // the magnitude-projected iterate.
  constexpr double kMomentum = 0.99;
  Rng rng(0x676c696dULL);
  Spectrogram spec;
  spec.n_bins = n_bins;
  spec.frames.resize(n_frames);
  for (int t = 0; t < n_frames; ++t) {
    spec.frames[t].resize(n_bins);
    for (int k = 0; k < n_bins; ++k)
      spec.frames[t][k] =
          std::polar(target[t][k], rng.Uniform(0.0, 2.0 * M_PI));
  }
  Spectrogram prev = spec;
  Spectrogram proj = spec;

  double conv = 1.0;
  for (int it = 0; it < cfg.griffin_lim_iters; ++it) {
    std::vector<float> x = Istft(spec, cfg, out_len);
    Spectrogram re = Stft(std::span<const float>(x), cfg);
    double err_sq = 0.0;
    int frames = std::min(n_frames, re.n_frames());
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < n_bins; ++k) {
        std::complex<double> c = re.frames[t][k];
        double m = std::abs(c);
        err_sq += (m - target[t][k]) * (m - target[t][k]);
        std::complex<double> projected =
            m > 1e-12 ? c / m * target[t][k]
                      : std::complex<double>(target[t][k], 0.0);
        spec.frames[t][k] =
            projected + kMomentum * (projected - prev.frames[t][k]);
        proj.frames[t][k] = projected;
      }
    }
    std::swap(prev, proj);
    conv = target_norm_sq > 0 ? std::sqrt(err_sq / target_norm_sq) : 0.0;
  }
  if (convergence) *convergence = conv;

  Waveform out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  out.samples = Istft(prev, cfg, out_len);
  return out;
}

}  // namespace vani
