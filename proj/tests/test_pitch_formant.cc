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

#include "testutil.h"
#include "vani/dsp/formant.h"
#include "vani/dsp/pitch.h"
#include "vani/util/error.h"
#include "vani/util/rng.h"

using namespace vani;
using testutil::Silence;
using testutil::Sine;
using testutil::Vowel;

TEST_CASE("yin locks onto a 220 Hz sine") {
  DspConfig cfg;
  Waveform w = Sine(220.0, 0.8);
  PitchTrack track = ExtractF0(std::span<const float>(w.samples), cfg);
  int lo = track.n_frames() / 4;
  int hi = track.n_frames() - lo;
  for (int t = lo; t < hi; ++t) {
    CHECK(track.voiced[t] == 1);
    CHECK(std::abs(track.f0_hz[t] - 220.0f) <= 2.0f);
  }
}

TEST_CASE("yin leaves white noise mostly unvoiced") {
  DspConfig cfg;
  Rng rng(77);
  Waveform w;
  w.samples.resize(22050);
  for (auto& s : w.samples) s = static_cast<float>(rng.Uniform(-0.5, 0.5));
  PitchTrack track = ExtractF0(std::span<const float>(w.samples), cfg);
  int voiced = 0;
  for (uint8_t v : track.voiced) voiced += v;
  CHECK(static_cast<double>(voiced) / track.n_frames() < 0.20);
}

TEST_CASE("yin reports silence as unvoiced") {
  DspConfig cfg;
  Waveform w = Silence(0.5);
  PitchTrack track = ExtractF0(std::span<const float>(w.samples), cfg);
  for (int t = 0; t < track.n_frames(); ++t) {
    CHECK(track.voiced[t] == 0);
    CHECK(track.f0_hz[t] == 0.0f);
  }
}

TEST_CASE("yin tracks the mel frame grid") {
  DspConfig cfg;
  Waveform w = Sine(150.0, 0.5);
  PitchTrack track = ExtractF0(std::span<const float>(w.samples), cfg);
  CHECK(track.n_frames() == 1 + static_cast<int>(w.samples.size()) / cfg.hop);
}

TEST_CASE("formant_scale at alpha 1 is a round trip") {
  DspConfig cfg;
  Waveform w = Vowel(120.0, 1000.0, 150.0, 0.6);
  Waveform out = FormantScale(w, 1.0, cfg);
  REQUIRE(out.samples.size() == w.samples.size());
  double err = 0.0;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    double d = out.samples[i] - w.samples[i];
    err += d * d;
  }
  CHECK(std::sqrt(err / w.samples.size()) <= 1e-3);
}

TEST_CASE("formant_scale moves the envelope peak and preserves pitch") {
  DspConfig cfg;
  double hz_per_bin = static_cast<double>(cfg.sample_rate_hz) / cfg.n_fft;
  Waveform vowel = Vowel(120.0, 1000.0, 150.0, 0.8);

  double base_peak =
      testutil::EnvelopePeakViaHarmonics(vowel, 120.0, 500.0, 2000.0, cfg);
  CHECK(std::abs(base_peak - 1000.0) <= hz_per_bin);

  for (double alpha : {1.1, 0.875}) {
    CAPTURE(alpha);
    Waveform warped = FormantScale(vowel, alpha, cfg);
    CHECK(warped.samples.size() == vowel.samples.size());
    double peak = testutil::EnvelopePeakViaHarmonics(warped, 120.0, 500.0,
                                                     2000.0, cfg);
    CHECK(std::abs(peak - 1000.0 * alpha) <= hz_per_bin);

    PitchTrack track = ExtractF0(std::span<const float>(warped.samples), cfg);
    int lo = track.n_frames() / 4, hi = track.n_frames() - lo;
    double f0_sum = 0.0;
    int voiced = 0;
    for (int t = lo; t < hi; ++t)
      if (track.voiced[t]) {
        f0_sum += track.f0_hz[t];
        ++voiced;
      }
    REQUIRE(voiced > 0);
    CHECK(std::abs(f0_sum / voiced - 120.0) <= 3.0);
  }
}

TEST_CASE("formant_scale alpha then 1/alpha recovers the peak") {
  DspConfig cfg;
  double hz_per_bin = static_cast<double>(cfg.sample_rate_hz) / cfg.n_fft;
  Waveform vowel = Vowel(120.0, 1000.0, 150.0, 0.8);
  Waveform there = FormantScale(vowel, 1.1, cfg);
  Waveform back = FormantScale(there, 1.0 / 1.1, cfg);
  double peak =
      testutil::EnvelopePeakViaHarmonics(back, 120.0, 500.0, 2000.0, cfg);
  CHECK(std::abs(peak - 1000.0) <= hz_per_bin);
}

TEST_CASE("formant_scale validates alpha") {
  DspConfig cfg;
  Waveform w = Sine(200.0, 0.2);
  CHECK_THROWS_AS(FormantScale(w, 0.2, cfg), Error);
  CHECK_THROWS_AS(FormantScale(w, 3.0, cfg), Error);
}

TEST_CASE("cepstral envelope smooths the harmonic comb") {
  DspConfig cfg;
  // Synthetic log spectrum: broad bump at bin 50 plus fast comb ripple.
  int n_bins = cfg.n_fft / 2 + 1;
  std::vector<double> log_mag(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    double bump = 3.0 * std::exp(-0.5 * std::pow((k - 50.0) / 12.0, 2.0));
    double comb = 1.5 * std::cos(2.0 * M_PI * k / 5.6);
    log_mag[k] = bump + comb - 8.0;
  }
  std::vector<double> env = CepstralEnvelope(log_mag, cfg.n_fft,
                                             cfg.cepstral_order);
  // Envelope keeps the bump (peak near bin 50)...
  int argmax = 0;
  for (int k = 1; k < n_bins; ++k)
    if (env[k] > env[argmax]) argmax = k;
  CHECK(std::abs(argmax - 50) <= 3);
  // ...and flattens the comb: ripple energy well below the original.
  double ripple = 0.0;
  for (int k = 40; k < 60; ++k) {
    double d = (env[k] - env[k - 1]);
    ripple += d * d;
  }
  CHECK(ripple < 1.0);
}

TEST_CASE("augment_manifest mints speakers and preserves accents") {
  testutil::TempDir tmp("augment");
  DspConfig cfg;
  DatasetManifest m;
  for (int i = 0; i < 2; ++i) {
    Waveform w = Vowel(120.0 + 30.0 * i, 900.0, 150.0, 0.3);
    std::string id = "clip" + std::to_string(i);
    auto path = tmp.path() / (id + ".wav");
    WriteWav(w, path);
    ClipRecord r;
    r.clip_id = id;
    r.audio_path = path.string();
    r.speaker_id = "spk";
    r.language = "l1";
    r.accent_id = "acc1";
    r.transcript_gt = "text " + id;
    r.duration_s = w.DurationSeconds();
    m.records.push_back(r);
  }

  std::vector<double> scales = {0.875, 1.1};
  DatasetManifest out = AugmentManifest(m, scales, cfg, tmp.path() / "aug");
  CHECK(out.records.size() == m.records.size() * 3);

  std::set<std::string> speakers;
  for (const auto& r : out.records) {
    speakers.insert(r.speaker_id);
    CHECK(r.accent_id == "acc1");
    if (r.augmented_from) {
      CHECK(r.formant_scale.has_value());
      CHECK(*r.formant_scale != 1.0);
      CHECK(std::filesystem::exists(r.audio_path));
      const ClipRecord* orig = out.Find(*r.augmented_from);
      REQUIRE(orig != nullptr);
      CHECK(r.transcript_gt == orig->transcript_gt);
    }
  }
  CHECK(speakers ==
        std::set<std::string>{"spk", "spk@fs0.875", "spk@fs1.1"});
  CHECK_NOTHROW(ValidateManifest(out));

  // Empty scale list: unchanged.
  DatasetManifest same = AugmentManifest(m, {}, cfg, tmp.path() / "aug2");
  CHECK(same.records == m.records);
}

TEST_CASE("augment_manifest skips unreadable clips and reports them") {
  testutil::TempDir tmp("augskip");
  DspConfig cfg;
  DatasetManifest m;
  Waveform w = Vowel(140.0, 900.0, 150.0, 0.3);
  auto good_path = tmp.path() / "good.wav";
  WriteWav(w, good_path);
  ClipRecord good;
  good.clip_id = "good";
  good.audio_path = good_path.string();
  good.speaker_id = "spk";
  good.language = "l1";
  good.accent_id = "l1";
  good.transcript_gt = "t1";
  good.duration_s = w.DurationSeconds();
  ClipRecord bad = good;
  bad.clip_id = "bad";
  bad.audio_path = (tmp.path() / "missing.wav").string();
  bad.transcript_gt = "t2";
  m.records = {good, bad};

  std::vector<std::string> skipped;
  std::vector<double> scales = {0.875, 1.1};
  DatasetManifest out =
      AugmentManifest(m, scales, cfg, tmp.path() / "aug", 1, &skipped);
  // Both originals kept; only the readable clip gained augmented copies.
  CHECK(out.records.size() == 4);
  CHECK(skipped.size() == 2);
}
