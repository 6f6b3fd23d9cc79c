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

#include "vani/model/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vani/util/error.h"
#include "vani/util/io.h"

namespace vani {

namespace {

constexpr char kMagic[7] = {'V', 'A', 'N', 'I', 'M', 'D', 'L'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoints are little-endian");

template <typename T>
void Put(std::string* out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

template <typename T>
T Take(const char** p, const char* end) {
  if (*p + sizeof(T) > end) throw Error("truncated checkpoint");
  T v;
  std::memcpy(&v, *p, sizeof(T));
  *p += sizeof(T);
  return v;
}

}  // namespace

const Mat<float>* Checkpoint::Find(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return &m;
  return nullptr;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  Put<uint32_t>(&out, kVersion);
  std::string cfg_json = ckpt.config.ToJson();
  Put<uint32_t>(&out, static_cast<uint32_t>(cfg_json.size()));
  out += cfg_json;
  Put<uint32_t>(&out, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, m] : ckpt.tensors) {
    Put<uint32_t>(&out, static_cast<uint32_t>(name.size()));
    out += name;
    Put<uint32_t>(&out, static_cast<uint32_t>(m.rows));
    Put<uint32_t>(&out, static_cast<uint32_t>(m.cols));
    for (float v : m.v) Put<float>(&out, v);
  }
  AtomicWriteFile(path, out);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::string data = ReadTextFile(path);
  const char* p = data.data();
  const char* end = p + data.size();
  if (data.size() < sizeof(kMagic) ||
      std::memcmp(p, kMagic, sizeof(kMagic)) != 0)
    throw Error("bad checkpoint magic: " + path.string());
  p += sizeof(kMagic);
  uint32_t version = Take<uint32_t>(&p, end);
  if (version != kVersion)
    throw Error("unsupported checkpoint version: " + path.string());
  uint32_t json_len = Take<uint32_t>(&p, end);
  if (p + json_len > end) throw Error("truncated checkpoint config");
  Checkpoint ckpt;
  ckpt.config = ModelConfig::FromJson(std::string(p, json_len));
  p += json_len;
  uint32_t n_tensors = Take<uint32_t>(&p, end);
  ckpt.tensors.reserve(n_tensors);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    uint32_t name_len = Take<uint32_t>(&p, end);
    if (p + name_len > end) throw Error("truncated tensor name");
    std::string name(p, name_len);
    p += name_len;
    uint32_t rows = Take<uint32_t>(&p, end);
    uint32_t cols = Take<uint32_t>(&p, end);
    Mat<float> m(static_cast<int>(rows), static_cast<int>(cols));
    for (auto& v : m.v) v = Take<float>(&p, end);
    ckpt.tensors.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

}  // namespace vani
