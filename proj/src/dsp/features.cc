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

#include "vani/dsp/features.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>

#include "vani/dsp/formant.h"
#include "vani/dsp/pitch.h"
#include "vani/dsp/stft.h"
#include "vani/util/error.h"
#include "vani/util/parallel.h"

namespace vani {

namespace {

constexpr char kMagic[4] = {'V', 'A', 'N', 'I'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian");

template <typename T>
void Put(std::string* out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

template <typename T>
T Take(const char** p, const char* end) {
  if (*p + sizeof(T) > end) throw Error("truncated feature file");
  T v;
  std::memcpy(&v, *p, sizeof(T));
  *p += sizeof(T);
  return v;
}

}  // namespace

MelFeatures ExtractFeatures(const Waveform& w, const DspConfig& cfg) {
  cfg.Validate();
  MelFeatures out;
  out.mel = MelSpectrogram(std::span<const float>(w.samples), cfg);
  PitchTrack pitch = ExtractF0(std::span<const float>(w.samples), cfg);
  out.f0_hz = pitch.f0_hz;
  out.energy = ExtractEnergy(out.mel);
  out.hop_s = static_cast<float>(cfg.hop) / cfg.sample_rate_hz;
  out.sample_rate_hz = cfg.sample_rate_hz;
  if (static_cast<int>(out.f0_hz.size()) != out.mel.cols)
    throw Error("pitch/mel frame count mismatch");
  return out;
}

void SaveFeatures(const MelFeatures& feats, const std::filesystem::path& path) {
  std::string out;
  out.append(kMagic, 4);
  Put<uint32_t>(&out, kVersion);
  Put<uint32_t>(&out, static_cast<uint32_t>(feats.mel.rows));
  Put<uint32_t>(&out, static_cast<uint32_t>(feats.mel.cols));
  Put<float>(&out, feats.hop_s);
  Put<uint32_t>(&out, static_cast<uint32_t>(feats.sample_rate_hz));
  for (float v : feats.mel.v) Put<float>(&out, v);
  for (float v : feats.f0_hz) Put<float>(&out, v);
  for (float v : feats.energy) Put<float>(&out, v);

  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write features: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("short write: " + path.string());
}

MelFeatures LoadFeatures(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open features: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  const char* p = data.data();
  const char* end = p + data.size();
  if (data.size() < 4 || std::memcmp(p, kMagic, 4) != 0)
    throw Error("bad feature file magic: " + path.string());
  p += 4;
  uint32_t version = Take<uint32_t>(&p, end);
  if (version != kVersion)
    throw Error("unsupported feature file version: " + path.string());
  MelFeatures feats;
  uint32_t n_mels = Take<uint32_t>(&p, end);
  uint32_t n_frames = Take<uint32_t>(&p, end);
  feats.hop_s = Take<float>(&p, end);
  feats.sample_rate_hz = static_cast<int>(Take<uint32_t>(&p, end));
  feats.mel = Mat<float>(static_cast<int>(n_mels), static_cast<int>(n_frames));
  for (auto& v : feats.mel.v) v = Take<float>(&p, end);
  feats.f0_hz.resize(n_frames);
  for (auto& v : feats.f0_hz) v = Take<float>(&p, end);
  feats.energy.resize(n_frames);
  for (auto& v : feats.energy) v = Take<float>(&p, end);
  return feats;
}

std::string FormatScale(double scale) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", scale);
  return buf;
}

DatasetManifest AugmentManifest(const DatasetManifest& m,
                                std::span<const double> scales,
                                const DspConfig& cfg,
                                const std::filesystem::path& out_audio_dir,
                                int threads,
                                std::vector<std::string>* skipped) {
  DatasetManifest out = m;
  if (scales.empty()) return out;
  std::filesystem::create_directories(out_audio_dir);

  struct Job {
    const ClipRecord* rec;
    double scale;
  };
  std::vector<Job> jobs;
  for (const auto& r : m.records)
    for (double s : scales) jobs.push_back({&r, s});

  std::vector<std::optional<ClipRecord>> results(jobs.size());
  std::vector<std::string> failures(jobs.size());
  ParallelFor(jobs.size(), threads, [&](size_t i) {
    const ClipRecord& r = *jobs[i].rec;
    double scale = jobs[i].scale;
    std::string tag = "fs" + FormatScale(scale);
    try {
      Waveform w = ReadWav(r.audio_path);
      Waveform warped = FormantScale(w, scale, cfg);
      std::filesystem::path dst =
          out_audio_dir / (r.clip_id + "_" + tag + ".wav");
      WriteWav(warped, dst);
      ClipRecord a = r;
      a.clip_id = r.clip_id + "_" + tag;
      a.audio_path = dst.string();
      a.speaker_id = r.speaker_id + "@" + tag;
      a.augmented_from = r.clip_id;
      a.formant_scale = scale;
      results[i] = std::move(a);
    } catch (const std::exception& e) {
      failures[i] = r.clip_id + " x" + FormatScale(scale) + ": " + e.what();
    }
  });

  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i])
      out.records.push_back(std::move(*results[i]));
    else if (skipped)
      skipped->push_back(failures[i]);
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return out;
}

}  // namespace vani
