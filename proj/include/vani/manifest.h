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

#ifndef VANI_MANIFEST_H_
#define VANI_MANIFEST_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vani {

// One audio clip with its transcript and bookkeeping. Manifests of these
// records are the currency passed between every pipeline stage.
struct ClipRecord {
  std::string clip_id;
  std::string audio_path;
  std::string speaker_id;
  std::string language;
  std::string accent_id;
  std::string transcript_gt;
  std::optional<std::string> transcript_asr;
  std::optional<double> cer;
  double duration_s = 0.0;
  std::optional<std::string> augmented_from;
  std::optional<double> formant_scale;

  bool operator==(const ClipRecord&) const = default;
};

enum class SplitTag { kRaw, kCleaned, kPruned, kParallel, kTrain, kVal };

std::string SplitTagName(SplitTag tag);
SplitTag ParseSplitTag(const std::string& name);

struct DatasetManifest {
  std::vector<ClipRecord> records;  // sorted by clip_id on load/save
  SplitTag split_tag = SplitTag::kRaw;

  bool operator==(const DatasetManifest&) const = default;

  const ClipRecord* Find(const std::string& clip_id) const;
};

// Checks clip_id uniqueness, duration_s > 0, cer >= 0 and the
// augmented_from <=> formant_scale pairing. Throws Error on violation.
void ValidateManifest(const DatasetManifest& m);

// Reads a JSONL manifest. An optional leading header object carries the
// split tag; every other line is one record. Errors carry line numbers.
DatasetManifest LoadManifest(const std::filesystem::path& path);

// Writes records sorted by clip_id, keys in canonical order, optional
// fields omitted. Atomic: temp file then rename.
void SaveManifest(const DatasetManifest& m, const std::filesystem::path& path);

struct GroupSummary {
  int64_t file_count = 0;
  double total_hours = 0.0;
};

// Per-(speaker, language) file counts and hours, in the layout of the
// dataset summary tables.
std::map<std::pair<std::string, std::string>, GroupSummary> Summarize(
    const DatasetManifest& m);

std::string RenderSummary(const DatasetManifest& m);

}  // namespace vani

#endif  // VANI_MANIFEST_H_
