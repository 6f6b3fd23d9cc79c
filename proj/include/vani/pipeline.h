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

#ifndef VANI_PIPELINE_H_
#define VANI_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vani/curation.h"
#include "vani/dsp/dsp.h"
#include "vani/eval.h"
#include "vani/manifest.h"
#include "vani/model/config.h"
#include "vani/model/net.h"
#include "vani/text.h"

namespace vani {

struct PipelineConfig {
  DspConfig dsp;
  SelectionConfig selection;
  ModelConfig model;
  std::filesystem::path workdir = "vani_work";
  uint64_t seed = 1234;
  int threads = 1;

  std::filesystem::path ManifestDir() const { return workdir / "manifests"; }
  std::filesystem::path AudioDir() const { return workdir / "audio"; }
  std::filesystem::path FeatureDir() const { return workdir / "features"; }
  std::filesystem::path CheckpointDir() const { return workdir / "checkpoints"; }
  std::filesystem::path ReportDir() const { return workdir / "reports"; }
  std::filesystem::path LogDir() const { return workdir / "logs"; }

  std::string ToJson() const;
  static PipelineConfig FromJsonFile(const std::filesystem::path& path);
};

std::string DspConfigToJson(const DspConfig& cfg);
DspConfig DspConfigFromJson(const std::string& text);
std::string SelectionConfigToJson(const SelectionConfig& cfg);
SelectionConfig SelectionConfigFromJson(const std::string& text);

struct StageResult {
  int64_t input_count = 0;
  int64_t output_count = 0;
  std::vector<std::string> notes;
};

// {stage, input_count, output_count, config_hash, seed} written to
// <workdir>/logs/<stage>.json. The hash covers only the sub-config the
// stage actually reads.
void WriteStageLog(const PipelineConfig& cfg, const std::string& stage,
                   const StageResult& result, uint64_t config_hash);

uint64_t HashSelectionConfig(const PipelineConfig& cfg);
uint64_t HashDspConfig(const PipelineConfig& cfg);
uint64_t HashModelConfig(const PipelineConfig& cfg);

// ---- curation stages ----

StageResult StageClean(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& out_manifest);

// Merges hypotheses from asr_jsonl ({"clip_id","transcript_asr"}) when
// given, then keeps the per-speaker top-k by CER.
StageResult StagePrune(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& out_manifest,
                       const std::optional<std::filesystem::path>& asr_jsonl);

// Parallel-prompt selection per language (all languages unless one is
// named); writes pairs_<language>.json next to the output manifest.
StageResult StagePair(const PipelineConfig& cfg,
                      const std::filesystem::path& in_manifest,
                      const std::filesystem::path& out_manifest,
                      const std::optional<std::string>& language);

StageResult StageBudget(const PipelineConfig& cfg,
                        const std::filesystem::path& in_manifest,
                        const std::filesystem::path& out_manifest);

StageResult StageSplit(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& out_train,
                       const std::filesystem::path& out_val);

// ---- audio stages (write processed wavs under AudioDir()/<stage>) ----

StageResult StageTrim(const PipelineConfig& cfg,
                      const std::filesystem::path& in_manifest,
                      const std::filesystem::path& out_manifest);

StageResult StageNormalize(const PipelineConfig& cfg,
                           const std::filesystem::path& in_manifest,
                           const std::filesystem::path& out_manifest);

StageResult StageAugment(const PipelineConfig& cfg,
                         const std::filesystem::path& in_manifest,
                         const std::filesystem::path& out_manifest,
                         const std::vector<double>& scales);

StageResult StageFeaturize(const PipelineConfig& cfg,
                           const std::filesystem::path& in_manifest);

// ---- model stages ----

struct TrainingData {
  std::vector<TrainingExample<float>> examples;
  SymbolTable table;
  ModelConfig model_cfg;
  std::vector<std::string> skipped;
};

// Tokenizes transcripts, loads features and assigns uniform durations.
// Speaker/accent inventories and the vocabulary size come from the data.
TrainingData BuildTrainingExamples(const DatasetManifest& m,
                                   const std::filesystem::path& feature_dir,
                                   const PipelineConfig& cfg);

// Trains and writes checkpoint, "<ckpt>.opt", symbols.json and loss CSV
// into CheckpointDir().
StageResult StageTrain(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& ckpt_path,
                       const std::filesystem::path& loss_csv);

// ---- evaluation protocol ----

struct SynthOutputs {
  DatasetManifest manifest;  // synthesized clips
  std::vector<PromptAssignment> plan;
};

// Synthesizes the task plan from the prompt inventory (10 own-language /
// 50 other-language per speaker by default), writing mels, Griffin-Lim
// wavs and a manifest for the external ASR/embedder under out_dir. With
// revocode_gt, ground-truth features are also passed through Griffin-Lim
// into out_dir/gt_revocoded so the embedder can use re-vocoded references
// instead of raw ones.
SynthOutputs StageSynthProtocol(const PipelineConfig& cfg,
                                const std::filesystem::path& ckpt_path,
                                const std::filesystem::path& prompts_path,
                                const DatasetManifest& gt_manifest,
                                const std::vector<EvalTask>& tasks,
                                const std::filesystem::path& out_dir,
                                StageResult* result,
                                bool revocode_gt = false);

// Joins external ASR output and embeddings into the final report.
EvalReport StageEval(const PipelineConfig& cfg,
                     const std::filesystem::path& synth_manifest,
                     const std::filesystem::path& gt_manifest,
                     const std::filesystem::path& asr_jsonl,
                     const std::filesystem::path& synth_embeddings,
                     const std::filesystem::path& gt_embeddings,
                     const std::filesystem::path& out_report,
                     StageResult* result);

// speaker -> language of their clips.
std::map<std::string, std::string> SpeakerLanguages(const DatasetManifest& m);

}  // namespace vani

#endif  // VANI_PIPELINE_H_
