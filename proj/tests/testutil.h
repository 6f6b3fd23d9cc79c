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

#ifndef VANI_TESTS_TESTUTIL_H_
#define VANI_TESTS_TESTUTIL_H_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vani/dsp/dsp.h"
#include "vani/dsp/features.h"
#include "vani/dsp/fft.h"
#include "vani/dsp/stft.h"
#include "vani/eval.h"
#include "vani/manifest.h"
#include "vani/model/config.h"
#include "vani/util/io.h"
#include "vani/util/rng.h"

namespace vani::testutil {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ 0x9e3779b97f4a7c15ULL ^
            static_cast<uint64_t>(
                std::chrono::steady_clock::now().time_since_epoch().count()));
    path_ = std::filesystem::temp_directory_path() /
            ("vani_" + tag + "_" + std::to_string(rng.Next() & 0xffffff));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Waveform Sine(double freq_hz, double dur_s, int sr = 22050,
                     double amp = 0.5) {
  Waveform w;
  w.sample_rate_hz = sr;
  size_t n = static_cast<size_t>(dur_s * sr);
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i)
    w.samples[i] =
        static_cast<float>(amp * std::sin(2.0 * M_PI * freq_hz * i / sr));
  return w;
}

inline Waveform Silence(double dur_s, int sr = 22050) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.assign(static_cast<size_t>(dur_s * sr), 0.0f);
  return w;
}

inline Waveform Concat(const std::vector<Waveform>& parts) {
  Waveform out;
  out.sample_rate_hz = parts.empty() ? 22050 : parts[0].sample_rate_hz;
  for (const auto& p : parts)
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
  return out;
}

// Source-filter vowel: impulse train at f0 through one second-order
// resonator at fc with bandwidth bw.
inline Waveform Vowel(double f0_hz, double fc_hz, double bw_hz, double dur_s,
                      int sr = 22050) {
  Waveform w;
  w.sample_rate_hz = sr;
  size_t n = static_cast<size_t>(dur_s * sr);
  w.samples.assign(n, 0.0f);

  double r = std::exp(-M_PI * bw_hz / sr);
  double theta = 2.0 * M_PI * fc_hz / sr;
  double a1 = 2.0 * r * std::cos(theta);
  double a2 = -r * r;

  double period = sr / f0_hz;
  double next_pulse = 0.0;
  double y1 = 0.0, y2 = 0.0;
  double peak = 0.0;
  std::vector<double> y(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double x = 0.0;
    if (static_cast<double>(i) >= next_pulse) {
      x = 1.0;
      next_pulse += period;
    }
    double yi = x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = yi;
    y[i] = yi;
    peak = std::max(peak, std::abs(yi));
  }
  for (size_t i = 0; i < n; ++i)
    w.samples[i] = static_cast<float>(0.8 * y[i] / peak);
  return w;
}

// Average magnitude spectrum over interior STFT frames.
inline std::vector<double> AverageSpectrum(const Waveform& w,
                                           const DspConfig& cfg) {
  Spectrogram spec = Stft(std::span<const float>(w.samples), cfg);
  int n_bins = spec.n_bins;
  std::vector<double> avg(n_bins, 0.0);
  int lo = spec.n_frames() / 4;
  int hi = spec.n_frames() - lo;
  int count = 0;
  for (int t = lo; t < hi; ++t, ++count)
    for (int k = 0; k < n_bins; ++k) avg[k] += std::abs(spec.frames[t][k]);
  for (auto& v : avg) v /= std::max(1, count);
  return avg;
}

// Spectral-envelope peak measured independently of the cepstral machinery:
// sample the average spectrum at the harmonics of f0, then fit a parabola
// in log amplitude around the strongest harmonic.
inline double EnvelopePeakViaHarmonics(const Waveform& w, double f0_hz,
                                       double lo_hz, double hi_hz,
                                       const DspConfig& cfg) {
  std::vector<double> avg = AverageSpectrum(w, cfg);
  double hz_per_bin = static_cast<double>(cfg.sample_rate_hz) / cfg.n_fft;

  auto amp_at = [&](double hz) {
    int center = static_cast<int>(std::lround(hz / hz_per_bin));
    double best = 0.0;
    for (int k = std::max(0, center - 2);
         k <= std::min<int>(avg.size() - 1, center + 2); ++k)
      best = std::max(best, avg[k]);
    return best;
  };

  int k_lo = static_cast<int>(std::ceil(lo_hz / f0_hz));
  int k_hi = static_cast<int>(std::floor(hi_hz / f0_hz));
  int best_k = k_lo;
  double best_amp = -1.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    double a = amp_at(k * f0_hz);
    if (a > best_amp) {
      best_amp = a;
      best_k = k;
    }
  }
  double am = std::log(std::max(1e-12, amp_at((best_k - 1) * f0_hz)));
  double a0 = std::log(std::max(1e-12, amp_at(best_k * f0_hz)));
  double ap = std::log(std::max(1e-12, amp_at((best_k + 1) * f0_hz)));
  double denom = am - 2.0 * a0 + ap;
  double delta = std::abs(denom) > 1e-12 ? 0.5 * (am - ap) / denom : 0.0;
  delta = std::clamp(delta, -1.0, 1.0);
  return (best_k + delta) * f0_hz;
}

inline double DominantFrequencyHz(const Waveform& w) {
  size_t n = 1;
  while (n * 2 <= w.samples.size() && n < 65536) n *= 2;
  std::vector<double> x(w.samples.begin(), w.samples.begin() + n);
  std::vector<std::complex<double>> spec = RealFft(x, static_cast<int>(n));
  size_t best = 1;
  for (size_t k = 1; k + 1 < n / 2; ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return static_cast<double>(best) * w.sample_rate_hz / n;
}

inline double RmsOf(std::span<const float> x) {
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : std::sqrt(acc / x.size());
}

// ---- toy corpus ----

struct ToyCorpus {
  std::filesystem::path dir;
  std::filesystem::path manifest_path;
  std::filesystem::path asr_path;
  std::filesystem::path prompts_path;
  DatasetManifest manifest;
};

// Speech-like harmonic stack with an amplitude envelope and speaker F0.
inline Waveform ToyUtterance(double f0_hz, double dur_s, uint64_t seed,
                             int sr = 22050) {
  Waveform w;
  w.sample_rate_hz = sr;
  size_t n = static_cast<size_t>(dur_s * sr);
  w.samples.resize(n);
  Rng rng(seed);
  double phases[6];
  for (auto& p : phases) p = rng.Uniform(0.0, 2.0 * M_PI);
  size_t ramp = static_cast<size_t>(0.05 * sr);
  for (size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sr;
    double v = 0.0;
    for (int k = 1; k <= 6; ++k)
      v += (0.5 / k) * std::sin(2.0 * M_PI * k * f0_hz * t + phases[k - 1]);
    double env = 1.0;
    if (i < ramp) env = static_cast<double>(i) / ramp;
    if (n - 1 - i < ramp) env = static_cast<double>(n - 1 - i) / ramp;
    w.samples[i] = static_cast<float>(0.45 * env * v);
  }
  return w;
}

// 3 speakers (sp1, sp2 in language l1; sp3 in l2), silence-padded clips,
// slightly corrupted ASR hypotheses, and a 60-per-language prompt
// inventory.
inline ToyCorpus BuildToyCorpus(const std::filesystem::path& dir, int n_clips,
                                uint64_t seed) {
  ToyCorpus corpus;
  corpus.dir = dir;
  std::filesystem::create_directories(dir / "audio");

  const char* l1_syll[] = {"ka", "ma", "ta", "ra", "sa", "la"};
  const char* l2_syll[] = {"ni", "pu", "vo", "ze", "xu", "yo"};
  struct Spk {
    const char* id;
    const char* lang;
    const char* accent;
    double f0;
  };
  Spk speakers[] = {{"sp1", "l1", "a1", 150.0},
                    {"sp2", "l1", "a1", 220.0},
                    {"sp3", "l2", "a2", 180.0}};

  Rng rng(seed);
  std::string asr_jsonl;
  for (int i = 0; i < n_clips; ++i) {
    const Spk& spk = speakers[i % 3];
    bool l1 = std::string(spk.lang) == "l1";
    const char** syll = l1 ? l1_syll : l2_syll;

    std::string text;
    int n_syll = 3 + static_cast<int>(rng.Below(3));
    for (int s = 0; s < n_syll; ++s) {
      if (s) text += ' ';
      text += syll[rng.Below(6)];
    }
    text += std::to_string(i);  // keep transcripts distinct

    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "%s_%03d", spk.id, i);
    std::string clip_id = idbuf;

    double dur = 0.40 + 0.02 * (i % 6);
    Waveform utt = ToyUtterance(spk.f0, dur, seed ^ (i * 2654435761ULL));
    Waveform clip = Concat({Silence(0.15), utt, Silence(0.15)});
    std::filesystem::path wav_path = dir / "audio" / (clip_id + ".wav");
    WriteWav(clip, wav_path);

    ClipRecord r;
    r.clip_id = clip_id;
    r.audio_path = wav_path.string();
    r.speaker_id = spk.id;
    r.language = spk.lang;
    r.accent_id = spk.accent;
    r.transcript_gt = text;
    r.duration_s = clip.DurationSeconds();
    corpus.manifest.records.push_back(r);

    // Hypothesis with an occasional single-character error.
    std::string hyp = text;
    if (i % 3 == 0 && !hyp.empty()) hyp[hyp.size() / 2] = 'q';
    asr_jsonl += "{\"clip_id\":\"" + clip_id + "\",\"transcript_asr\":\"" +
                 hyp + "\"}\n";
  }

  corpus.manifest_path = dir / "raw_manifest.jsonl";
  SaveManifest(corpus.manifest, corpus.manifest_path);
  corpus.asr_path = dir / "asr_hyps.jsonl";
  AtomicWriteFile(corpus.asr_path, asr_jsonl);

  std::vector<PromptSpec> prompts;
  Rng prng(seed ^ 0x70726f6d);
  for (int lang = 0; lang < 2; ++lang) {
    const char** syll = lang == 0 ? l1_syll : l2_syll;
    for (int i = 0; i < 60; ++i) {
      PromptSpec p;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "p_l%d_%03d", lang + 1, i);
      p.prompt_id = buf;
      p.language = lang == 0 ? "l1" : "l2";
      p.accent_id = lang == 0 ? "a1" : "a2";
      int n_syll = 2 + static_cast<int>(prng.Below(3));
      for (int s = 0; s < n_syll; ++s) {
        if (s) p.text += ' ';
        p.text += syll[prng.Below(6)];
      }
      prompts.push_back(std::move(p));
    }
  }
  corpus.prompts_path = dir / "prompts.jsonl";
  SavePrompts(prompts, corpus.prompts_path);
  return corpus;
}

// Deterministic stand-in for the external speaker embedder: mel band means
// plus pitch statistics.
inline std::vector<float> MockEmbedding(const MelFeatures& feats) {
  int bands = 8;
  std::vector<float> emb;
  int per = std::max(1, feats.mel.rows / bands);
  for (int b = 0; b < bands; ++b) {
    double acc = 0.0;
    int count = 0;
    for (int r = b * per; r < std::min(feats.mel.rows, (b + 1) * per); ++r)
      for (int t = 0; t < feats.mel.cols; ++t, ++count) acc += feats.mel(r, t);
    emb.push_back(count ? static_cast<float>(acc / count) : 0.0f);
  }
  double f0_acc = 0.0;
  int voiced = 0;
  for (float f : feats.f0_hz)
    if (f > 0) {
      f0_acc += f;
      ++voiced;
    }
  emb.push_back(voiced ? static_cast<float>(f0_acc / voiced / 100.0) : 0.0f);
  emb.push_back(feats.f0_hz.empty()
                    ? 0.0f
                    : static_cast<float>(double(voiced) / feats.f0_hz.size()));
  return emb;
}

inline EmbeddingSet EmbedManifest(const DatasetManifest& m,
                                  const DspConfig& cfg) {
  EmbeddingSet set;
  for (const auto& r : m.records) {
    Waveform w = ReadWav(r.audio_path);
    set.Insert(r.clip_id, MockEmbedding(ExtractFeatures(w, cfg)));
  }
  return set;
}

// Small-but-real model configuration for training-speed-sensitive tests.
inline ModelConfig ToyModelConfig() {
  ModelConfig cfg;
  cfg.d_txt = 96;
  cfg.d_accent = 4;
  cfg.d_speaker = 8;
  cfg.lstm_hidden = 128;
  cfg.predictor_hidden = 64;
  return cfg;
}

// Tiny configuration for oracle tests (Jacobian, gradients).
inline ModelConfig TinyModelConfig(int n_mels = 2) {
  ModelConfig cfg;
  cfg.n_mels = n_mels;
  cfg.d_txt = 6;
  cfg.d_accent = 2;
  cfg.d_speaker = 3;
  cfg.lstm_hidden = 8;
  cfg.predictor_hidden = 4;
  cfg.vocab_size = 8;
  cfg.n_speakers = 2;
  cfg.n_accents = 2;
  return cfg;
}

}  // namespace vani::testutil

#endif  // VANI_TESTS_TESTUTIL_H_
