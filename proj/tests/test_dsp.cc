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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>

#include "testutil.h"
#include "vani/dsp/dsp.h"
#include "vani/dsp/features.h"
#include "vani/dsp/fft.h"
#include "vani/dsp/stft.h"
#include "vani/dsp/wav.h"
#include "vani/util/error.h"
#include "vani/util/rng.h"

using namespace vani;
using testutil::Concat;
using testutil::Silence;
using testutil::Sine;

TEST_CASE("fft matches a direct DFT") {
  Rng rng(3);
  int n = 64;
  std::vector<std::complex<double>> a(n);
  for (auto& c : a) c = {rng.Uniform(-1, 1), rng.Uniform(-1, 1)};
  std::vector<std::complex<double>> ref(n);
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (int t = 0; t < n; ++t)
      acc += a[t] * std::polar(1.0, -2.0 * M_PI * k * t / n);
    ref[k] = acc;
  }
  std::vector<std::complex<double>> fft = a;
  Fft(&fft, false);
  for (int k = 0; k < n; ++k) CHECK(std::abs(fft[k] - ref[k]) < 1e-9);

  Fft(&fft, true);
  for (int k = 0; k < n; ++k) CHECK(std::abs(fft[k] - a[k]) < 1e-12);
}

TEST_CASE("stft satisfies Parseval per frame") {
  DspConfig cfg;
  Waveform w = Sine(440.0, 0.5);
  Spectrogram spec = Stft(std::span<const float>(w.samples), cfg);
  std::vector<double> window = HannWindow(cfg.win);

  int t = spec.n_frames() / 2;
  int64_t start = static_cast<int64_t>(t) * cfg.hop - cfg.n_fft / 2;
  double time_power = 0.0;
  for (int i = 0; i < cfg.n_fft; ++i) {
    int64_t idx = start + i;
    double s = (idx >= 0 && idx < static_cast<int64_t>(w.samples.size()))
                   ? w.samples[idx]
                   : 0.0;
    double v = s * window[i];
    time_power += v * v;
  }
  double freq_power = 0.0;
  for (int k = 0; k < spec.n_bins; ++k) {
    double m = std::norm(spec.frames[t][k]);
    // One-sided spectrum: interior bins count twice.
    freq_power += (k == 0 || k == cfg.n_fft / 2) ? m : 2.0 * m;
  }
  freq_power /= cfg.n_fft;
  CHECK(std::abs(freq_power - time_power) <=
        1e-6 * std::max(1.0, time_power));
}

TEST_CASE("istft inverts stft") {
  DspConfig cfg;
  Rng rng(17);
  Waveform w;
  w.samples.resize(22050);
  for (auto& s : w.samples)
    s = static_cast<float>(rng.Uniform(-0.5, 0.5));
  Spectrogram spec = Stft(std::span<const float>(w.samples), cfg);
  std::vector<float> rec = Istft(spec, cfg, w.samples.size());
  double err = 0.0;
  for (size_t i = 0; i < w.samples.size(); ++i)
    err += std::abs(static_cast<double>(rec[i]) - w.samples[i]);
  err /= w.samples.size();
  CHECK(err < 1e-6);
}

TEST_CASE("mel frame count is 1 + len/hop") {
  DspConfig cfg;
  Waveform w = Sine(440.0, 1.0);
  Mat<float> mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  CHECK(mel.rows == cfg.n_mels);
  CHECK(mel.cols == 1 + static_cast<int>(w.samples.size()) / cfg.hop);
}

TEST_CASE("mel of zero signal is the log floor") {
  DspConfig cfg;
  Waveform w = Silence(0.3);
  Mat<float> mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  float floor_val = std::log(1e-5f);
  for (float v : mel.v) CHECK(v == doctest::Approx(floor_val).epsilon(1e-6));
}

TEST_CASE("too-short signal is rejected") {
  DspConfig cfg;
  Waveform w = Silence(0.01);  // 220 samples < win
  CHECK_THROWS_AS(MelSpectrogram(std::span<const float>(w.samples), cfg),
                  Error);
}

TEST_CASE("1 kHz sine peaks at the mel filter nearest 1 kHz") {
  DspConfig cfg;
  Waveform w = Sine(1000.0, 0.5);
  Mat<float> mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  MelFilterbank fb(cfg);
  int t = mel.cols / 2;
  int argmax = 0;
  for (int f = 1; f < mel.rows; ++f)
    if (mel(f, t) > mel(argmax, t)) argmax = f;
  int nearest = 0;
  for (int f = 1; f < cfg.n_mels; ++f)
    if (std::abs(fb.CenterFreqHz(f) - 1000.0) <
        std::abs(fb.CenterFreqHz(nearest) - 1000.0))
      nearest = f;
  CHECK(argmax == nearest);
}

TEST_CASE("energy is the per-frame channel mean") {
  Mat<float> mel(80, 3);
  for (int r = 0; r < 80; ++r) mel(r, 0) = 1.0f;
  for (int r = 0; r < 80; ++r) mel(r, 1) = std::log(1e-5f);
  // Frame 2: half zeros, half ones.
  for (int r = 0; r < 40; ++r) mel(r, 2) = 0.0f;
  for (int r = 40; r < 80; ++r) mel(r, 2) = 1.0f;
  std::vector<float> e = ExtractEnergy(mel);
  CHECK(e[0] == doctest::Approx(1.0f));
  CHECK(e[1] == doctest::Approx(std::log(1e-5f)));
  CHECK(e[2] == doctest::Approx(0.5f));
}

TEST_CASE("energy equals column mean exactly on random matrices") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    int rows = 1 + static_cast<int>(rng.Below(80));
    int cols = 1 + static_cast<int>(rng.Below(20));
    Mat<float> mel(rows, cols);
    for (auto& v : mel.v) v = static_cast<float>(rng.Uniform(-12.0, 3.0));
    std::vector<float> e = ExtractEnergy(mel);
    for (int t = 0; t < cols; ++t) {
      double s = 0.0;
      for (int r = 0; r < rows; ++r) s += mel(r, t);
      CHECK(e[t] == static_cast<float>(s / rows));
    }
  }
}

TEST_CASE("normalize_volume scales the peak to 0.95") {
  Waveform w = Sine(440.0, 0.1, 22050, 0.5);
  Waveform out = NormalizeVolume(w);
  float peak = 0.0f;
  for (float s : out.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak == doctest::Approx(0.95f).epsilon(1e-6));

  Waveform again = NormalizeVolume(out);
  for (size_t i = 0; i < out.samples.size(); ++i)
    CHECK(std::abs(again.samples[i] - out.samples[i]) < 1e-9f);

  CHECK_THROWS_AS(NormalizeVolume(Silence(0.1)), Error);
}

TEST_CASE("trim_silence recovers the tone plus exact pads") {
  DspConfig cfg;
  Waveform w = Concat({Silence(1.0), Sine(440.0, 2.0), Silence(1.0)});
  Waveform out = TrimSilence(w, cfg);
  double expect = 2.0 + 2 * cfg.pad_s;
  double tol = 2.0 * cfg.hop / cfg.sample_rate_hz;
  CHECK(std::abs(out.DurationSeconds() - expect) <= tol);
  // Pads are exactly round(pad_s * sr) zeros.
  size_t pad = static_cast<size_t>(std::llround(cfg.pad_s * cfg.sample_rate_hz));
  for (size_t i = 0; i < pad; ++i) {
    CHECK(out.samples[i] == 0.0f);
    CHECK(out.samples[out.samples.size() - 1 - i] == 0.0f);
  }

  // No silence to trim: the pads are all that is added.
  Waveform tone = Sine(440.0, 1.0);
  Waveform padded = TrimSilence(tone, cfg);
  CHECK(std::abs(padded.DurationSeconds() - (1.0 + 2 * cfg.pad_s)) <= tol);

  CHECK_THROWS_AS(TrimSilence(Silence(2.0), cfg), Error);
}

TEST_CASE("trim_silence is stable under re-trimming") {
  DspConfig cfg;
  Waveform w = Concat({Silence(0.7), Sine(300.0, 1.5), Silence(0.9)});
  Waveform once = TrimSilence(w, cfg);
  Waveform twice = TrimSilence(once, cfg);
  double hop_s = static_cast<double>(cfg.hop) / cfg.sample_rate_hz;
  CHECK(std::abs(twice.DurationSeconds() - once.DurationSeconds()) <=
        hop_s + 1e-9);
}

TEST_CASE("wav round trip pcm16 and float32") {
  testutil::TempDir tmp("wav");
  Waveform w = Sine(440.0, 0.25, 22050, 0.7);

  auto p16 = tmp.path() / "a16.wav";
  WriteWav(w, p16, WavFormat::kPcm16);
  Waveform r16 = ReadWav(p16);
  CHECK(r16.sample_rate_hz == 22050);
  REQUIRE(r16.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); i += 97)
    CHECK(r16.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-3));

  auto p32 = tmp.path() / "a32.wav";
  WriteWav(w, p32, WavFormat::kFloat32);
  Waveform r32 = ReadWav(p32);
  REQUIRE(r32.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); i += 97)
    CHECK(r32.samples[i] == w.samples[i]);

  CHECK(ProbeWavSamples(p16) == static_cast<int64_t>(w.samples.size()));
  CHECK(ProbeWavSamples(tmp.path() / "missing.wav") == -1);

  Waveform empty;
  auto p0 = tmp.path() / "empty.wav";
  WriteWav(empty, p0);
  CHECK(ProbeWavSamples(p0) == 0);
  CHECK(ReadWav(p0).samples.empty());
}

TEST_CASE("feature file round trip") {
  testutil::TempDir tmp("feat");
  DspConfig cfg;
  Waveform w = Sine(220.0, 0.4);
  MelFeatures feats = ExtractFeatures(w, cfg);
  CHECK(feats.mel.cols == feats.n_frames());
  CHECK(static_cast<int>(feats.f0_hz.size()) == feats.n_frames());
  CHECK(static_cast<int>(feats.energy.size()) == feats.n_frames());

  auto path = tmp.path() / "clip.vani";
  SaveFeatures(feats, path);
  MelFeatures loaded = LoadFeatures(path);
  CHECK(loaded == feats);
}

TEST_CASE("feature extraction is deterministic bit for bit") {
  DspConfig cfg;
  Waveform w = testutil::Vowel(120.0, 1000.0, 150.0, 0.5);
  MelFeatures a = ExtractFeatures(w, cfg);
  MelFeatures b = ExtractFeatures(w, cfg);
  CHECK(a == b);
}

TEST_CASE("griffin_lim reconstructs a sine's frequency") {
  DspConfig cfg;
  Waveform w = Sine(440.0, 0.6);
  Mat<float> mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  Waveform rec = GriffinLim(mel, cfg);
  CHECK(rec.samples.size() > 0);
  double freq = testutil::DominantFrequencyHz(rec);
  CHECK(std::abs(freq - 440.0) <= 5.0);
}

TEST_CASE("griffin_lim converges on a speech-like signal") {
  DspConfig cfg;
  Waveform w = testutil::ToyUtterance(150.0, 0.6, 42);
  Mat<float> mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  double conv = 0.0;
  GriffinLim(mel, cfg, &conv);
  CHECK(conv <= 0.1);
}

TEST_CASE("griffin_lim of an all-floor mel is near silence") {
  DspConfig cfg;
  Mat<float> mel(cfg.n_mels, 40);
  for (auto& v : mel.v) v = std::log(1e-5f);
  Waveform rec = GriffinLim(mel, cfg);
  CHECK(testutil::RmsOf(rec.samples) < 1e-3);
}

TEST_CASE("mel(griffin_lim(M)) is close to M on a speech-like input") {
  DspConfig cfg;
  Waveform w = testutil::Vowel(120.0, 1000.0, 150.0, 0.7);
  Mat<float> mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  Waveform rec = GriffinLim(mel, cfg);
  Mat<float> mel2 = MelSpectrogram(std::span<const float>(rec.samples), cfg);
  int frames = std::min(mel.cols, mel2.cols);
  double num = 0.0, den = 0.0;
  for (int t = 0; t < frames; ++t)
    for (int r = 0; r < mel.rows; ++r) {
      double d = mel(r, t) - mel2(r, t);
      num += d * d;
      den += static_cast<double>(mel(r, t)) * mel(r, t);
    }
  CHECK(std::sqrt(num / den) <= 0.15);
}
