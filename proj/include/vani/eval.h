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

#ifndef VANI_EVAL_H_
#define VANI_EVAL_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vani/manifest.h"

namespace vani {

// Speaker embeddings produced by an external embedder, keyed by clip id.
// JSONL interchange: {"clip_id": ..., "dim": N, "vector": [...]}.
struct EmbeddingSet {
  int dim = 0;
  std::map<std::string, std::vector<float>> entries;

  void Insert(const std::string& clip_id, std::vector<float> vec);
  void Save(const std::filesystem::path& path) const;
  static EmbeddingSet Load(const std::filesystem::path& path);
};

double CosineSimilarity(std::span<const float> u, std::span<const float> v);

// Mean cosine of each synthesized clip against the centroid of its
// speaker's ground-truth embeddings, averaged per speaker.
// speaker_of maps synthesized clip_id -> speaker_id.
std::map<std::string, double> SpeakerSimilarity(
    const EmbeddingSet& synth, const EmbeddingSet& gt,
    const std::map<std::string, std::string>& speaker_of);

// Per-speaker mean CER of hypothesis transcripts against ground truth,
// matched by clip_id. Hypotheses come from an external ASR run.
std::map<std::string, double> CerEval(const DatasetManifest& hyp,
                                      const DatasetManifest& gt);

// {"clip_id": ..., "transcript_asr": ...} JSONL, as produced by the
// external ASR wrapper. Returns clip_id -> hypothesis.
std::map<std::string, std::string> LoadAsrHypotheses(
    const std::filesystem::path& path);

enum class EvalTask { kResynthesis, kTransfer };

std::string EvalTaskName(EvalTask task);

struct EvalRow {
  std::string speaker_id;
  EvalTask task = EvalTask::kResynthesis;
  double mean_cer = 0.0;
  double mean_cosine = 0.0;
  int n_prompts = 0;
};

// Per-speaker rows (speaker-major, resynthesis before transfer) plus
// overall means, mirroring the CER/cosine result tables.
struct EvalReport {
  std::vector<EvalRow> rows;
  double overall_cer = 0.0;
  double overall_cosine = 0.0;

  void Save(const std::filesystem::path& path) const;
  static EvalReport Load(const std::filesystem::path& path);
  std::string RenderTable() const;
};

// Default protocol sizes: 10 own-language prompts per speaker
// (resynthesis), 50 other-language prompts (transfer).
inline constexpr int kResynthesisPrompts = 10;
inline constexpr int kTransferPrompts = 50;

// One synthesis job: text in some language, rendered as `speaker_id` with
// the accent of the text's language.
struct PromptAssignment {
  std::string prompt_id;
  std::string speaker_id;
  std::string accent_id;
  std::string language;
  std::string text;
  EvalTask task = EvalTask::kResynthesis;

  // clip id of the synthesized output.
  std::string SynthClipId() const;
};

struct PromptSpec {
  std::string prompt_id;
  std::string language;
  std::string accent_id;
  std::string text;
};

// {"prompt_id", "language", "accent_id", "text"} JSONL.
std::vector<PromptSpec> LoadPrompts(const std::filesystem::path& path);
void SavePrompts(std::span<const PromptSpec> prompts,
                 const std::filesystem::path& path);

// Builds the task plan for each speaker from the prompt inventory:
// n own-language prompts for resynthesis, n other-language for transfer
// (prompt_id order). Emits a warning line per shortfall instead of failing.
std::vector<PromptAssignment> BuildProtocol(
    std::span<const PromptSpec> prompts,
    const std::map<std::string, std::string>& speaker_language, EvalTask task,
    int prompts_per_speaker, std::vector<std::string>* warnings = nullptr);

// Folds per-clip metrics into report rows. cer_of/cos_of map synthesized
// clip ids to their metric values.
EvalReport AssembleReport(std::span<const PromptAssignment> plan,
                          const std::map<std::string, double>& cer_of,
                          const std::map<std::string, double>& cos_of);

}  // namespace vani

#endif  // VANI_EVAL_H_
