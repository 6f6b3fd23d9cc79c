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

#include "vani/dsp/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vani/util/error.h"

namespace vani {

namespace {

struct ChunkHeader {
  char id[4];
  uint32_t size;
};

struct FmtChunk {
  uint16_t audio_format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint32_t byte_rate = 0;
  uint16_t block_align = 0;
  uint16_t bits_per_sample = 0;
};

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

template <typename T>
void WriteLE(std::ofstream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

// Scans RIFF chunks; returns true with fmt/data info on success.
bool ParseWavLayout(std::ifstream& in, FmtChunk* fmt, std::streampos* data_pos,
                    uint32_t* data_size) {
  char riff[12];
  if (!in.read(riff, 12)) return false;
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    return false;
  bool have_fmt = false, have_data = false;
  while (in) {
    ChunkHeader ch;
    if (!in.read(reinterpret_cast<char*>(&ch), sizeof(ch))) break;
    if (std::memcmp(ch.id, "fmt ", 4) == 0) {
      char buf[16];
      if (ch.size < 16 || !in.read(buf, 16)) return false;
      std::memcpy(&fmt->audio_format, buf + 0, 2);
      std::memcpy(&fmt->channels, buf + 2, 2);
      std::memcpy(&fmt->sample_rate, buf + 4, 4);
      std::memcpy(&fmt->byte_rate, buf + 8, 4);
      std::memcpy(&fmt->block_align, buf + 12, 2);
      std::memcpy(&fmt->bits_per_sample, buf + 14, 2);
      in.seekg(ch.size - 16 + (ch.size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(ch.id, "data", 4) == 0) {
      *data_pos = in.tellg();
      *data_size = ch.size;
      have_data = true;
      in.seekg(ch.size + (ch.size & 1), std::ios::cur);
    } else {
      in.seekg(ch.size + (ch.size & 1), std::ios::cur);
    }
    if (have_fmt && have_data) return true;
  }
  return have_fmt && have_data;
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open wav: " + path.string());
  FmtChunk fmt;
  std::streampos data_pos{};
  uint32_t data_size = 0;
  if (!ParseWavLayout(in, &fmt, &data_pos, &data_size))
    throw Error("malformed wav: " + path.string());
  if (fmt.channels != 1)
    throw Error("only mono wav supported: " + path.string());
  if (fmt.sample_rate == 0) throw Error("zero sample rate: " + path.string());

  Waveform w;
  w.sample_rate_hz = static_cast<int>(fmt.sample_rate);
  in.clear();
  in.seekg(data_pos);
  if (fmt.audio_format == kFormatPcm && fmt.bits_per_sample == 16) {
    size_t n = data_size / 2;
    std::vector<int16_t> raw(n);
    if (n > 0 && !in.read(reinterpret_cast<char*>(raw.data()), n * 2))
      throw Error("truncated wav data: " + path.string());
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) w.samples[i] = raw[i] / 32768.0f;
  } else if (fmt.audio_format == kFormatFloat && fmt.bits_per_sample == 32) {
    size_t n = data_size / 4;
    w.samples.resize(n);
    if (n > 0 && !in.read(reinterpret_cast<char*>(w.samples.data()), n * 4))
      throw Error("truncated wav data: " + path.string());
  } else {
    throw Error("unsupported wav encoding (want PCM16 or float32): " +
                path.string());
  }
  return w;
}

void WriteWav(const Waveform& w, const std::filesystem::path& path,
              WavFormat format) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write wav: " + path.string());

  uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  uint16_t block = bits / 8;
  uint32_t data_size = static_cast<uint32_t>(w.samples.size()) * block;
  uint32_t sr = static_cast<uint32_t>(w.sample_rate_hz);

  out.write("RIFF", 4);
  WriteLE<uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  WriteLE<uint32_t>(out, 16);
  WriteLE<uint16_t>(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  WriteLE<uint16_t>(out, 1);
  WriteLE<uint32_t>(out, sr);
  WriteLE<uint32_t>(out, sr * block);
  WriteLE<uint16_t>(out, block);
  WriteLE<uint16_t>(out, bits);
  out.write("data", 4);
  WriteLE<uint32_t>(out, data_size);

  if (format == WavFormat::kPcm16) {
    for (float s : w.samples) {
      float c = std::clamp(s, -1.0f, 1.0f);
      WriteLE<int16_t>(out, static_cast<int16_t>(std::lrintf(c * 32767.0f)));
    }
  } else {
    for (float s : w.samples) WriteLE<float>(out, s);
  }
  if (!out) throw Error("short write: " + path.string());
}

int64_t ProbeWavSamples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return -1;
  FmtChunk fmt;
  std::streampos data_pos{};
  uint32_t data_size = 0;
  if (!ParseWavLayout(in, &fmt, &data_pos, &data_size)) return -1;
  if (fmt.block_align == 0) return -1;
  return static_cast<int64_t>(data_size / fmt.block_align);
}

}  // namespace vani
