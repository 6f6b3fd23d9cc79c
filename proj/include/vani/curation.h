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

#ifndef VANI_CURATION_H_
#define VANI_CURATION_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vani/manifest.h"

namespace vani {

struct SelectionConfig {
  int top_k_per_speaker = 8000;
  double budget_hours_per_speaker = 5.0;
  int parallel_pairs_per_language = 3000;
  double val_fraction = 0.04;

  void Validate() const;
};

// Two clips of different speakers of one language whose transcripts overlap;
// pair_cer is the transcript CER with clip_a as reference.
struct PromptPair {
  std::string clip_a;
  std::string clip_b;
  double pair_cer = 0.0;

  bool operator==(const PromptPair&) const = default;
};

// Callback probing a clip's audio; returns sample count, 0 for empty and
// -1 for unreadable. Injected so curation stays independent of audio I/O.
using AudioProbe = std::function<int64_t(const ClipRecord&)>;

// Drops empty/unreadable audio and duplicate transcripts, and normalizes
// transcript_gt in place. Dropped clip ids are appended to dropped_log.
DatasetManifest Clean(const DatasetManifest& m, const AudioProbe& probe,
                      std::vector<std::string>* dropped_log = nullptr);

// Keeps the top_k records with least CER per speaker (ties by clip_id).
// Throws when a record lacks an ASR hypothesis. Fills missing cer fields.
DatasetManifest PruneTopK(const DatasetManifest& m, const SelectionConfig& cfg);

// Greedy minimal-CER disjoint pairing between the two speakers of the given
// language. Requires exactly two speakers in that language.
std::vector<PromptPair> SelectParallel(const DatasetManifest& m,
                                       const SelectionConfig& cfg,
                                       const std::string& language,
                                       int threads = 1);

// Keeps records per speaker, ascending CER, while the cumulative duration
// stays strictly below the hour budget.
DatasetManifest ApplyBudget(const DatasetManifest& m, const SelectionConfig& cfg,
                            std::vector<std::string>* warnings = nullptr);

// Deterministic per-speaker split; val gets round(val_fraction * n) records,
// at least 1 when the speaker has >= 2, never all of them.
std::pair<DatasetManifest, DatasetManifest> SplitTrainVal(
    const DatasetManifest& m, const SelectionConfig& cfg, uint64_t seed);

void SavePromptPairs(const std::filesystem::path& path,
                     const std::string& language,
                     const std::vector<PromptPair>& pairs);
std::pair<std::string, std::vector<PromptPair>> LoadPromptPairs(
    const std::filesystem::path& path);

// Manifest restricted to the clips named by pairs.
DatasetManifest ManifestFromPairs(const DatasetManifest& m,
                                  const std::vector<PromptPair>& pairs);

}  // namespace vani

#endif  // VANI_CURATION_H_
