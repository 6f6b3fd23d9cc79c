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

#include "vani/pipeline.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "vani/dsp/features.h"
#include "vani/dsp/formant.h"
#include "vani/dsp/stft.h"
#include "vani/model/trainer.h"
#include "vani/util/error.h"
#include "vani/util/io.h"
#include "vani/util/parallel.h"
#include "vani/util/rng.h"

namespace vani {

using Json = nlohmann::ordered_json;

namespace {

template <typename T>
void GetIf(const Json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

Json DspToJsonObj(const DspConfig& c) {
  Json j;
  j["sample_rate_hz"] = c.sample_rate_hz;
  j["n_fft"] = c.n_fft;
  j["hop"] = c.hop;
  j["win"] = c.win;
  j["n_mels"] = c.n_mels;
  j["fmin_hz"] = c.fmin_hz;
  j["fmax_hz"] = c.fmax_hz;
  j["trim_threshold_db"] = c.trim_threshold_db;
  j["pad_s"] = c.pad_s;
  j["f0_min_hz"] = c.f0_min_hz;
  j["f0_max_hz"] = c.f0_max_hz;
  j["cepstral_order"] = c.cepstral_order;
  j["griffin_lim_iters"] = c.griffin_lim_iters;
  return j;
}

DspConfig DspFromJsonObj(const Json& j) {
  DspConfig c;
  GetIf(j, "sample_rate_hz", &c.sample_rate_hz);
  GetIf(j, "n_fft", &c.n_fft);
  GetIf(j, "hop", &c.hop);
  GetIf(j, "win", &c.win);
  GetIf(j, "n_mels", &c.n_mels);
  GetIf(j, "fmin_hz", &c.fmin_hz);
  GetIf(j, "fmax_hz", &c.fmax_hz);
  GetIf(j, "trim_threshold_db", &c.trim_threshold_db);
  GetIf(j, "pad_s", &c.pad_s);
  GetIf(j, "f0_min_hz", &c.f0_min_hz);
  GetIf(j, "f0_max_hz", &c.f0_max_hz);
  GetIf(j, "cepstral_order", &c.cepstral_order);
  GetIf(j, "griffin_lim_iters", &c.griffin_lim_iters);
  c.Validate();
  return c;
}

Json SelectionToJsonObj(const SelectionConfig& c) {
  Json j;
  j["top_k_per_speaker"] = c.top_k_per_speaker;
  j["budget_hours_per_speaker"] = c.budget_hours_per_speaker;
  j["parallel_pairs_per_language"] = c.parallel_pairs_per_language;
  j["val_fraction"] = c.val_fraction;
  return j;
}

SelectionConfig SelectionFromJsonObj(const Json& j) {
  SelectionConfig c;
  GetIf(j, "top_k_per_speaker", &c.top_k_per_speaker);
  GetIf(j, "budget_hours_per_speaker", &c.budget_hours_per_speaker);
  GetIf(j, "parallel_pairs_per_language", &c.parallel_pairs_per_language);
  GetIf(j, "val_fraction", &c.val_fraction);
  c.Validate();
  return c;
}

std::filesystem::path StageAudioDir(const PipelineConfig& cfg,
                                    const std::string& stage) {
  return cfg.AudioDir() / stage;
}

}  // namespace

std::string DspConfigToJson(const DspConfig& cfg) {
  return DspToJsonObj(cfg).dump();
}
DspConfig DspConfigFromJson(const std::string& text) {
  return DspFromJsonObj(Json::parse(text));
}
std::string SelectionConfigToJson(const SelectionConfig& cfg) {
  return SelectionToJsonObj(cfg).dump();
}
SelectionConfig SelectionConfigFromJson(const std::string& text) {
  return SelectionFromJsonObj(Json::parse(text));
}

std::string PipelineConfig::ToJson() const {
  Json j;
  j["workdir"] = workdir.string();
  j["seed"] = seed;
  j["threads"] = threads;
  j["dsp"] = DspToJsonObj(dsp);
  j["selection"] = SelectionToJsonObj(selection);
  j["model"] = Json::parse(model.ToJson());
  return j.dump(2);
}

PipelineConfig PipelineConfig::FromJsonFile(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(ReadTextFile(path));
  } catch (const Json::exception& e) {
    throw Error("bad pipeline config " + path.string() + ": " + e.what());
  }
  PipelineConfig cfg;
  if (j.contains("workdir")) cfg.workdir = j.at("workdir").get<std::string>();
  GetIf(j, "seed", &cfg.seed);
  GetIf(j, "threads", &cfg.threads);
  if (j.contains("dsp")) cfg.dsp = DspFromJsonObj(j.at("dsp"));
  if (j.contains("selection"))
    cfg.selection = SelectionFromJsonObj(j.at("selection"));
  if (j.contains("model"))
    cfg.model = ModelConfig::FromJson(j.at("model").dump());
  return cfg;
}

void WriteStageLog(const PipelineConfig& cfg, const std::string& stage,
                   const StageResult& result, uint64_t config_hash) {
  Json j;
  j["stage"] = stage;
  j["input_count"] = result.input_count;
  j["output_count"] = result.output_count;
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hex;
  j["seed"] = cfg.seed;
  if (!result.notes.empty()) j["notes"] = result.notes;
  std::filesystem::create_directories(cfg.LogDir());
  AtomicWriteFile(cfg.LogDir() / (stage + ".json"), j.dump(2) + "\n");
}

uint64_t HashSelectionConfig(const PipelineConfig& cfg) {
  return Fnv1a(SelectionConfigToJson(cfg.selection));
}
uint64_t HashDspConfig(const PipelineConfig& cfg) {
  return Fnv1a(DspConfigToJson(cfg.dsp));
}
uint64_t HashModelConfig(const PipelineConfig& cfg) {
  return Fnv1a(cfg.model.ToJson());
}

StageResult StageClean(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& out_manifest) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  AudioProbe probe = [](const ClipRecord& r) {
    return ProbeWavSamples(r.audio_path);
  };
  DatasetManifest out = Clean(in, probe, &res.notes);
  res.output_count = static_cast<int64_t>(out.records.size());
  SaveManifest(out, out_manifest);
  WriteStageLog(cfg, "clean", res, HashSelectionConfig(cfg));
  return res;
}

StageResult StagePrune(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& out_manifest,
                       const std::optional<std::filesystem::path>& asr_jsonl) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  if (asr_jsonl) {
    std::map<std::string, std::string> hyps = LoadAsrHypotheses(*asr_jsonl);
    for (auto& r : in.records) {
      auto it = hyps.find(r.clip_id);
      if (it != hyps.end()) r.transcript_asr = it->second;
    }
  }
  DatasetManifest out = PruneTopK(in, cfg.selection);
  res.output_count = static_cast<int64_t>(out.records.size());
  SaveManifest(out, out_manifest);
  WriteStageLog(cfg, "prune", res, HashSelectionConfig(cfg));
  return res;
}

StageResult StagePair(const PipelineConfig& cfg,
                      const std::filesystem::path& in_manifest,
                      const std::filesystem::path& out_manifest,
                      const std::optional<std::string>& language) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  std::set<std::string> languages;
  if (language) {
    languages.insert(*language);
  } else {
    for (const auto& r : in.records) languages.insert(r.language);
  }
  std::vector<PromptPair> all_pairs;
  for (const auto& lang : languages) {
    std::vector<PromptPair> pairs =
        SelectParallel(in, cfg.selection, lang, cfg.threads);
    res.notes.push_back("language " + lang + ": " +
                        std::to_string(pairs.size()) + " pairs");
    SavePromptPairs(
        out_manifest.parent_path() / ("pairs_" + lang + ".json"), lang, pairs);
    all_pairs.insert(all_pairs.end(), pairs.begin(), pairs.end());
  }
  DatasetManifest out = ManifestFromPairs(in, all_pairs);
  res.output_count = static_cast<int64_t>(out.records.size());
  SaveManifest(out, out_manifest);
  WriteStageLog(cfg, "pair", res, HashSelectionConfig(cfg));
  return res;
}

StageResult StageBudget(const PipelineConfig& cfg,
                        const std::filesystem::path& in_manifest,
                        const std::filesystem::path& out_manifest) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  DatasetManifest out = ApplyBudget(in, cfg.selection, &res.notes);
  res.output_count = static_cast<int64_t>(out.records.size());
  SaveManifest(out, out_manifest);
  WriteStageLog(cfg, "budget", res, HashSelectionConfig(cfg));
  return res;
}

StageResult StageSplit(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& out_train,
                       const std::filesystem::path& out_val) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  auto [train, val] = SplitTrainVal(in, cfg.selection, cfg.seed);
  res.output_count = static_cast<int64_t>(train.records.size());
  res.notes.push_back("val " + std::to_string(val.records.size()));
  SaveManifest(train, out_train);
  SaveManifest(val, out_val);
  uint64_t hash = Fnv1a(SelectionConfigToJson(cfg.selection) +
                        std::to_string(cfg.seed));
  WriteStageLog(cfg, "split", res, hash);
  return res;
}

namespace {

// Applies `process` to every clip, writing the result wav under
// AudioDir()/<stage> and updating audio_path/duration_s.
StageResult AudioMapStage(
    const PipelineConfig& cfg, const std::string& stage,
    const std::filesystem::path& in_manifest,
    const std::filesystem::path& out_manifest,
    const std::function<Waveform(const Waveform&)>& process) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  std::filesystem::path dir = StageAudioDir(cfg, stage);
  std::filesystem::create_directories(dir);

  std::vector<std::optional<ClipRecord>> outs(in.records.size());
  std::vector<std::string> errors(in.records.size());
  ParallelFor(in.records.size(), cfg.threads, [&](size_t i) {
    const ClipRecord& r = in.records[i];
    try {
      Waveform w = ReadWav(r.audio_path);
      Waveform processed = process(w);
      std::filesystem::path dst = dir / (r.clip_id + ".wav");
      WriteWav(processed, dst);
      ClipRecord c = r;
      c.audio_path = dst.string();
      c.duration_s = processed.DurationSeconds();
      outs[i] = std::move(c);
    } catch (const std::exception& e) {
      errors[i] = r.clip_id + ": " + e.what();
    }
  });

  DatasetManifest out;
  out.split_tag = in.split_tag;
  for (size_t i = 0; i < outs.size(); ++i) {
    if (outs[i])
      out.records.push_back(std::move(*outs[i]));
    else
      res.notes.push_back("skipped " + errors[i]);
  }
  res.output_count = static_cast<int64_t>(out.records.size());
  SaveManifest(out, out_manifest);
  WriteStageLog(cfg, stage, res, HashDspConfig(cfg));
  return res;
}

}  // namespace

StageResult StageTrim(const PipelineConfig& cfg,
                      const std::filesystem::path& in_manifest,
                      const std::filesystem::path& out_manifest) {
  return AudioMapStage(cfg, "trim", in_manifest, out_manifest,
                       [&](const Waveform& w) { return TrimSilence(w, cfg.dsp); });
}

StageResult StageNormalize(const PipelineConfig& cfg,
                           const std::filesystem::path& in_manifest,
                           const std::filesystem::path& out_manifest) {
  return AudioMapStage(cfg, "normalize", in_manifest, out_manifest,
                       [](const Waveform& w) { return NormalizeVolume(w); });
}

StageResult StageAugment(const PipelineConfig& cfg,
                         const std::filesystem::path& in_manifest,
                         const std::filesystem::path& out_manifest,
                         const std::vector<double>& scales) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  DatasetManifest out =
      AugmentManifest(in, scales, cfg.dsp, StageAudioDir(cfg, "augment"),
                      cfg.threads, &res.notes);
  res.output_count = static_cast<int64_t>(out.records.size());
  SaveManifest(out, out_manifest);
  uint64_t hash = Fnv1a(DspConfigToJson(cfg.dsp) + Json(scales).dump());
  WriteStageLog(cfg, "augment", res, hash);
  return res;
}

StageResult StageFeaturize(const PipelineConfig& cfg,
                           const std::filesystem::path& in_manifest) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  std::filesystem::create_directories(cfg.FeatureDir());
  std::vector<std::string> errors(in.records.size());
  std::vector<uint8_t> ok(in.records.size(), 0);
  ParallelFor(in.records.size(), cfg.threads, [&](size_t i) {
    const ClipRecord& r = in.records[i];
    try {
      Waveform w = ReadWav(r.audio_path);
      MelFeatures feats = ExtractFeatures(w, cfg.dsp);
      SaveFeatures(feats, cfg.FeatureDir() / (r.clip_id + ".vani"));
      ok[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = r.clip_id + ": " + e.what();
    }
  });
  for (size_t i = 0; i < ok.size(); ++i) {
    if (ok[i])
      ++res.output_count;
    else
      res.notes.push_back("skipped " + errors[i]);
  }
  WriteStageLog(cfg, "featurize", res, HashDspConfig(cfg));
  return res;
}

TrainingData BuildTrainingExamples(const DatasetManifest& m,
                                   const std::filesystem::path& feature_dir,
                                   const PipelineConfig& cfg) {
  TrainingData data;
  data.table = SymbolTable::Build({&m});

  std::set<std::string> speaker_set, accent_set;
  for (const auto& r : m.records) {
    speaker_set.insert(r.speaker_id);
    accent_set.insert(r.accent_id);
  }
  data.model_cfg = cfg.model;
  data.model_cfg.seed = cfg.seed;
  data.model_cfg.vocab_size = data.table.size();
  data.model_cfg.speakers.assign(speaker_set.begin(), speaker_set.end());
  data.model_cfg.accents.assign(accent_set.begin(), accent_set.end());
  data.model_cfg.n_speakers = static_cast<int>(speaker_set.size());
  data.model_cfg.n_accents = static_cast<int>(accent_set.size());

  for (const auto& r : m.records) {
    std::filesystem::path fpath = feature_dir / (r.clip_id + ".vani");
    if (!std::filesystem::exists(fpath)) {
      data.skipped.push_back(r.clip_id + " (no features)");
      continue;
    }
    MelFeatures feats = LoadFeatures(fpath);
    TrainingExample<float> ex;
    ex.tokens = Tokenize(r.transcript_gt, data.table);
    int tlen = ex.tokens.length();
    int frames = feats.n_frames();
    if (frames < tlen) {
      data.skipped.push_back(r.clip_id + " (fewer frames than tokens)");
      continue;
    }
    // Uniform duration assignment; the remainder goes to the first tokens.
    ex.durations.assign(tlen, frames / tlen);
    for (int i = 0; i < frames % tlen; ++i) ++ex.durations[i];
    ex.accent_idx = data.model_cfg.AccentIndex(r.accent_id);
    ex.speaker_idx = data.model_cfg.SpeakerIndex(r.speaker_id);
    ex.mel = feats.mel;
    ex.f0_hz.assign(feats.f0_hz.begin(), feats.f0_hz.end());
    ex.energy.assign(feats.energy.begin(), feats.energy.end());
    data.examples.push_back(std::move(ex));
  }
  return data;
}

StageResult StageTrain(const PipelineConfig& cfg,
                       const std::filesystem::path& in_manifest,
                       const std::filesystem::path& ckpt_path,
                       const std::filesystem::path& loss_csv) {
  DatasetManifest in = LoadManifest(in_manifest);
  StageResult res;
  res.input_count = static_cast<int64_t>(in.records.size());
  TrainingData data = BuildTrainingExamples(in, cfg.FeatureDir(), cfg);
  for (const auto& s : data.skipped) res.notes.push_back("skipped " + s);
  if (data.examples.empty()) throw Error("no usable training examples");

  VaniModel<float> model(data.model_cfg);
  res.notes.push_back("parameters " + std::to_string(model.CountParams()));
  Trainer trainer(&model);
  trainer.Train(data.examples, ckpt_path, loss_csv);
  data.table.Save(ckpt_path.parent_path() / "symbols.json");
  res.output_count = static_cast<int64_t>(data.examples.size());
  WriteStageLog(cfg, "train", res, HashModelConfig(cfg));
  return res;
}

std::map<std::string, std::string> SpeakerLanguages(const DatasetManifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& r : m.records) out.emplace(r.speaker_id, r.language);
  return out;
}

SynthOutputs StageSynthProtocol(const PipelineConfig& cfg,
                                const std::filesystem::path& ckpt_path,
                                const std::filesystem::path& prompts_path,
                                const DatasetManifest& gt_manifest,
                                const std::vector<EvalTask>& tasks,
                                const std::filesystem::path& out_dir,
                                StageResult* result, bool revocode_gt) {
  Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  auto model = ModelFromCheckpoint(ckpt);
  SymbolTable table =
      SymbolTable::Load(ckpt_path.parent_path() / "symbols.json");
  std::vector<PromptSpec> prompts = LoadPrompts(prompts_path);
  std::map<std::string, std::string> speaker_language =
      SpeakerLanguages(gt_manifest);

  StageResult res;
  res.input_count = static_cast<int64_t>(prompts.size());

  SynthOutputs out;
  for (EvalTask task : tasks) {
    int n = task == EvalTask::kResynthesis ? kResynthesisPrompts
                                           : kTransferPrompts;
    auto plan = BuildProtocol(prompts, speaker_language, task, n, &res.notes);
    out.plan.insert(out.plan.end(), plan.begin(), plan.end());
  }

  std::filesystem::path mel_dir = out_dir / "mels";
  std::filesystem::path wav_dir = out_dir / "wavs";
  std::filesystem::create_directories(mel_dir);
  std::filesystem::create_directories(wav_dir);

  std::vector<ClipRecord> records(out.plan.size());
  std::vector<std::string> errors(out.plan.size());
  ParallelFor(out.plan.size(), cfg.threads, [&](size_t i) {
    const PromptAssignment& a = out.plan[i];
    try {
      std::string clip_id = a.SynthClipId();
      TokenSequence tokens = Tokenize(a.text, table, /*allow_unk=*/true);
      int speaker_idx = model->config().SpeakerIndex(a.speaker_id);
      int accent_idx = model->config().AccentIndex(a.accent_id);
      // Per-prompt seed from (run seed, clip id): parallel order never
      // changes the result.
      uint64_t seed = MixSeed(cfg.seed, Fnv1a(clip_id));
      typename VaniModel<float>::Attributes attrs;
      Mat<float> mel = model->Synthesize(tokens, accent_idx, speaker_idx,
                                         model->config().temperature, seed,
                                         &attrs);
      MelFeatures feats;
      feats.mel = mel;
      feats.f0_hz.assign(attrs.f0_hz.begin(), attrs.f0_hz.end());
      feats.energy = ExtractEnergy(mel);
      feats.hop_s = static_cast<float>(cfg.dsp.hop) / cfg.dsp.sample_rate_hz;
      feats.sample_rate_hz = cfg.dsp.sample_rate_hz;
      SaveFeatures(feats, mel_dir / (clip_id + ".vani"));

      Waveform wav = GriffinLim(mel, cfg.dsp);
      std::filesystem::path wav_path = wav_dir / (clip_id + ".wav");
      WriteWav(wav, wav_path);

      ClipRecord r;
      r.clip_id = clip_id;
      r.audio_path = wav_path.string();
      r.speaker_id = a.speaker_id;
      r.language = a.language;
      r.accent_id = a.accent_id;
      r.transcript_gt = a.text;
      r.duration_s = wav.DurationSeconds();
      records[i] = std::move(r);
    } catch (const std::exception& e) {
      errors[i] = a.SynthClipId() + ": " + e.what();
    }
  });

  for (size_t i = 0; i < records.size(); ++i) {
    if (!records[i].clip_id.empty())
      out.manifest.records.push_back(std::move(records[i]));
    else
      res.notes.push_back("failed " + errors[i]);
  }
  SaveManifest(out.manifest, out_dir / "synth_manifest.jsonl");
  res.output_count = static_cast<int64_t>(out.manifest.records.size());

  if (revocode_gt) {
    std::filesystem::path gt_dir = out_dir / "gt_revocoded";
    std::filesystem::create_directories(gt_dir);
    std::vector<std::string> gt_errors(gt_manifest.records.size());
    ParallelFor(gt_manifest.records.size(), cfg.threads, [&](size_t i) {
      const ClipRecord& r = gt_manifest.records[i];
      try {
        std::filesystem::path fpath = cfg.FeatureDir() / (r.clip_id + ".vani");
        MelFeatures feats = std::filesystem::exists(fpath)
                                ? LoadFeatures(fpath)
                                : ExtractFeatures(ReadWav(r.audio_path), cfg.dsp);
        WriteWav(GriffinLim(feats.mel, cfg.dsp), gt_dir / (r.clip_id + ".wav"));
      } catch (const std::exception& e) {
        gt_errors[i] = r.clip_id + ": " + e.what();
      }
    });
    for (const auto& err : gt_errors)
      if (!err.empty()) res.notes.push_back("gt revocode failed " + err);
  }

  WriteStageLog(cfg, "synth", res, HashModelConfig(cfg));
  if (result) *result = res;
  // Keep the manifest sorted like the saved file.
  std::sort(out.manifest.records.begin(), out.manifest.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return out;
}

EvalReport StageEval(const PipelineConfig& cfg,
                     const std::filesystem::path& synth_manifest,
                     const std::filesystem::path& gt_manifest,
                     const std::filesystem::path& asr_jsonl,
                     const std::filesystem::path& synth_embeddings,
                     const std::filesystem::path& gt_embeddings,
                     const std::filesystem::path& out_report,
                     StageResult* result) {
  DatasetManifest synth = LoadManifest(synth_manifest);
  DatasetManifest gt = LoadManifest(gt_manifest);
  std::map<std::string, std::string> hyps = LoadAsrHypotheses(asr_jsonl);
  EmbeddingSet synth_emb = EmbeddingSet::Load(synth_embeddings);
  EmbeddingSet gt_emb = EmbeddingSet::Load(gt_embeddings);
  std::map<std::string, std::string> speaker_language = SpeakerLanguages(gt);

  // Per-speaker ground-truth embedding centroids.
  std::map<std::string, std::string> gt_speaker_of;
  for (const auto& r : gt.records) gt_speaker_of[r.clip_id] = r.speaker_id;
  std::map<std::string, std::pair<std::vector<double>, int>> centroid_acc;
  for (const auto& [clip_id, vec] : gt_emb.entries) {
    auto it = gt_speaker_of.find(clip_id);
    if (it == gt_speaker_of.end()) continue;
    auto& [acc, n] = centroid_acc[it->second];
    if (acc.empty()) acc.assign(vec.size(), 0.0);
    for (size_t i = 0; i < vec.size(); ++i) acc[i] += vec[i];
    ++n;
  }
  std::map<std::string, std::vector<float>> centroid;
  for (auto& [spk, acc_n] : centroid_acc) {
    std::vector<float> c(acc_n.first.size());
    for (size_t i = 0; i < c.size(); ++i)
      c[i] = static_cast<float>(acc_n.first[i] / acc_n.second);
    centroid[spk] = std::move(c);
  }

  std::map<std::string, double> cer_of, cos_of;
  std::vector<PromptAssignment> plan;
  for (const auto& r : synth.records) {
    auto h = hyps.find(r.clip_id);
    if (h == hyps.end())
      throw Error("no ASR hypothesis for synthesized clip " + r.clip_id);
    cer_of[r.clip_id] = Cer(r.transcript_gt, h->second);

    auto e = synth_emb.entries.find(r.clip_id);
    if (e == synth_emb.entries.end())
      throw Error("no embedding for synthesized clip " + r.clip_id);
    auto c = centroid.find(r.speaker_id);
    if (c == centroid.end())
      throw Error("no ground-truth embeddings for speaker " + r.speaker_id);
    cos_of[r.clip_id] = CosineSimilarity(e->second, c->second);

    PromptAssignment a;
    size_t sep = r.clip_id.find("__");
    a.prompt_id = sep == std::string::npos ? r.clip_id : r.clip_id.substr(sep + 2);
    a.speaker_id = r.speaker_id;
    a.accent_id = r.accent_id;
    a.language = r.language;
    a.text = r.transcript_gt;
    auto sl = speaker_language.find(r.speaker_id);
    bool own = sl != speaker_language.end() && sl->second == r.language;
    a.task = own ? EvalTask::kResynthesis : EvalTask::kTransfer;
    plan.push_back(std::move(a));
  }

  EvalReport report = AssembleReport(plan, cer_of, cos_of);
  report.Save(out_report);

  StageResult res;
  res.input_count = static_cast<int64_t>(synth.records.size());
  res.output_count = static_cast<int64_t>(report.rows.size());
  WriteStageLog(cfg, "eval", res, HashModelConfig(cfg));
  if (result) *result = res;
  return report;
}

}  // namespace vani
