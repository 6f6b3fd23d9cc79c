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

#ifndef VANI_MODEL_CHECKPOINT_H_
#define VANI_MODEL_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vani/model/config.h"
#include "vani/util/mat.h"

namespace vani {

// Checkpoint container: "VANIMDL" magic, u32 version, u32 json length,
// config JSON, u32 tensor count, then per tensor { u32 name length, name,
// u32 rows, u32 cols, f32 data row-major }.
struct Checkpoint {
  ModelConfig config;
  std::vector<std::pair<std::string, Mat<float>>> tensors;

  const Mat<float>* Find(const std::string& name) const;
};

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace vani

#endif  // VANI_MODEL_CHECKPOINT_H_
