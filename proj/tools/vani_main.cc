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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vani/dsp/features.h"
#include "vani/dsp/stft.h"
#include "vani/eval.h"
#include "vani/manifest.h"
#include "vani/model/trainer.h"
#include "vani/pipeline.h"
#include "vani/util/error.h"

namespace {

using vani::PipelineConfig;

struct GlobalArgs {
  std::string config_file;
  std::string workdir;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
};

// Precedence: flags > VANI_WORKDIR > config file > defaults.
PipelineConfig ResolveConfig(const GlobalArgs& g) {
  PipelineConfig cfg;
  if (!g.config_file.empty())
    cfg = PipelineConfig::FromJsonFile(g.config_file);
  if (const char* env = std::getenv("VANI_WORKDIR"); env && *env)
    cfg.workdir = env;
  if (!g.workdir.empty()) cfg.workdir = g.workdir;
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  cfg.model.seed = cfg.seed;
  return cfg;
}

void PrintResult(const std::string& stage, const vani::StageResult& res) {
  std::cout << stage << ": " << res.input_count << " -> " << res.output_count
            << " records\n";
  for (const auto& n : res.notes) std::cout << "  " << n << "\n";
}

std::vector<vani::EvalTask> ParseTasks(const std::string& name) {
  if (name == "resynthesis") return {vani::EvalTask::kResynthesis};
  if (name == "transfer") return {vani::EvalTask::kTransfer};
  if (name == "both")
    return {vani::EvalTask::kResynthesis, vani::EvalTask::kTransfer};
  throw vani::Error("unknown task: " + name + " (want resynthesis|transfer|both)");
}

int Run(int argc, char** argv) {
  CLI::App app{"VANI data, training and evaluation pipeline"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_file, "pipeline config JSON");
  app.add_option("--workdir", g.workdir, "working directory");
  uint64_t seed_val = 0;
  int threads_val = 0;
  auto* seed_opt = app.add_option("--seed", seed_val, "run seed");
  auto* threads_opt = app.add_option("--threads", threads_val,
                                     "max worker threads for per-clip maps");

  std::string in_path, out_path, out2_path, asr_path, language, scales_csv;
  std::string ckpt_path, prompts_path, gt_path, task_name = "both";
  std::string emb_synth, emb_gt, report_path, text, speaker, accent;
  std::string preset;
  int top_k = 0;
  double budget_hours = 0.0;

  auto* clean = app.add_subcommand("clean", "drop empty audio and duplicate transcripts");
  clean->add_option("--in", in_path)->required();
  clean->add_option("--out", out_path)->required();

  auto* prune = app.add_subcommand("prune", "keep per-speaker top-k least-CER clips");
  prune->add_option("--in", in_path)->required();
  prune->add_option("--out", out_path)->required();
  prune->add_option("--asr", asr_path, "ASR hypotheses JSONL");
  prune->add_option("--top-k", top_k, "override top_k_per_speaker");

  auto* pair = app.add_subcommand("pair", "cross-speaker parallel prompt selection");
  pair->add_option("--in", in_path)->required();
  pair->add_option("--out", out_path)->required();
  pair->add_option("--language", language, "restrict to one language");

  auto* budget = app.add_subcommand("budget", "apply the per-speaker hour budget");
  budget->add_option("--in", in_path)->required();
  budget->add_option("--out", out_path)->required();
  budget->add_option("--budget-hours", budget_hours, "override budget");

  auto* split = app.add_subcommand("split", "deterministic train/val split");
  split->add_option("--in", in_path)->required();
  split->add_option("--train", out_path)->required();
  split->add_option("--val", out2_path)->required();

  auto* trim = app.add_subcommand("trim", "trim silences and pad 0.2 s");
  trim->add_option("--in", in_path)->required();
  trim->add_option("--out", out_path)->required();

  auto* normalize = app.add_subcommand("normalize", "peak volume normalization");
  normalize->add_option("--in", in_path)->required();
  normalize->add_option("--out", out_path)->required();

  auto* augment = app.add_subcommand("augment", "formant-scaling speaker augmentation");
  augment->add_option("--in", in_path)->required();
  augment->add_option("--out", out_path)->required();
  augment->add_option("--scales", scales_csv, "comma-separated scales")
      ->default_val("0.875,1.1");

  auto* featurize = app.add_subcommand("featurize", "extract mel/F0/energy features");
  featurize->add_option("--in", in_path)->required();

  auto* train = app.add_subcommand("train", "train the mel decoder");
  train->add_option("--in", in_path)->required();

  bool revocode_gt = false;
  auto* synth = app.add_subcommand("synth", "synthesize prompts or one utterance");
  synth->add_option("--checkpoint", ckpt_path)->required();
  synth->add_option("--prompts", prompts_path, "prompt inventory JSONL");
  synth->add_option("--gt-manifest", gt_path, "manifest defining speaker languages");
  synth->add_option("--task", task_name, "resynthesis|transfer|both");
  synth->add_option("--out", out_path, "output directory")->required();
  synth->add_option("--text", text, "single utterance text");
  synth->add_option("--speaker", speaker, "single utterance speaker");
  synth->add_option("--accent", accent, "single utterance accent");
  synth->add_flag("--revocode-gt", revocode_gt,
                  "also Griffin-Lim the ground-truth features so the "
                  "embedder can use re-vocoded references");

  auto* eval = app.add_subcommand("eval", "assemble CER/cosine report");
  eval->add_option("--synth-manifest", in_path)->required();
  eval->add_option("--gt-manifest", gt_path)->required();
  eval->add_option("--asr", asr_path)->required();
  eval->add_option("--synth-embeddings", emb_synth)->required();
  eval->add_option("--gt-embeddings", emb_gt)->required();
  eval->add_option("--out", report_path)->required();

  auto* report = app.add_subcommand("report", "render a report or dataset summary");
  report->add_option("--eval", in_path, "eval report JSON");
  report->add_option("--dataset", gt_path, "manifest to summarize");

  auto* pipeline = app.add_subcommand("pipeline", "run a named stage recipe");
  pipeline->add_option("--preset", preset, "track2 | track13")->required();
  pipeline->add_option("--in", in_path, "raw manifest")->required();
  pipeline->add_option("--asr", asr_path, "ASR hypotheses JSONL (track2)");
  pipeline->add_option("--scales", scales_csv, "augment scales (track13)")
      ->default_val("0.875,1.1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 1 = usage error; --help exits 0
  }

  if (seed_opt->count()) g.seed = seed_val;
  if (threads_opt->count()) g.threads = threads_val;
  PipelineConfig cfg = ResolveConfig(g);
  std::filesystem::create_directories(cfg.workdir);

  auto parse_scales = [&]() {
    std::vector<double> scales;
    std::stringstream ss(scales_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) scales.push_back(std::stod(item));
    return scales;
  };

  if (*clean) {
    PrintResult("clean", vani::StageClean(cfg, in_path, out_path));
  } else if (*prune) {
    if (top_k > 0) cfg.selection.top_k_per_speaker = top_k;
    std::optional<std::filesystem::path> asr;
    if (!asr_path.empty()) asr = asr_path;
    PrintResult("prune", vani::StagePrune(cfg, in_path, out_path, asr));
  } else if (*pair) {
    std::optional<std::string> lang;
    if (!language.empty()) lang = language;
    PrintResult("pair", vani::StagePair(cfg, in_path, out_path, lang));
  } else if (*budget) {
    if (budget_hours > 0.0) cfg.selection.budget_hours_per_speaker = budget_hours;
    PrintResult("budget", vani::StageBudget(cfg, in_path, out_path));
  } else if (*split) {
    PrintResult("split", vani::StageSplit(cfg, in_path, out_path, out2_path));
  } else if (*trim) {
    PrintResult("trim", vani::StageTrim(cfg, in_path, out_path));
  } else if (*normalize) {
    PrintResult("normalize", vani::StageNormalize(cfg, in_path, out_path));
  } else if (*augment) {
    PrintResult("augment", vani::StageAugment(cfg, in_path, out_path, parse_scales()));
  } else if (*featurize) {
    PrintResult("featurize", vani::StageFeaturize(cfg, in_path));
  } else if (*train) {
    PrintResult("train",
                vani::StageTrain(cfg, in_path,
                                 cfg.CheckpointDir() / "model.ckpt",
                                 cfg.CheckpointDir() / "loss_curve.csv"));
  } else if (*synth) {
    if (!text.empty()) {
      // One-shot synthesis of a single utterance.
      vani::Checkpoint ckpt = vani::LoadCheckpoint(ckpt_path);
      auto model = vani::ModelFromCheckpoint(ckpt);
      vani::SymbolTable table = vani::SymbolTable::Load(
          std::filesystem::path(ckpt_path).parent_path() / "symbols.json");
      vani::TokenSequence tokens = vani::Tokenize(text, table, true);
      vani::Mat<float> mel = model->Synthesize(
          tokens, model->config().AccentIndex(accent),
          model->config().SpeakerIndex(speaker),
          model->config().temperature, cfg.seed);
      vani::Waveform wav = vani::GriffinLim(mel, cfg.dsp);
      std::filesystem::create_directories(out_path);
      vani::WriteWav(wav, std::filesystem::path(out_path) / "utterance.wav");
      std::cout << "synth: 1 utterance, " << mel.cols << " frames\n";
    } else {
      if (prompts_path.empty() || gt_path.empty())
        throw vani::Error("protocol synth needs --prompts and --gt-manifest");
      vani::StageResult res;
      vani::StageSynthProtocol(cfg, ckpt_path, prompts_path,
                               vani::LoadManifest(gt_path), ParseTasks(task_name),
                               out_path, &res, revocode_gt);
      PrintResult("synth", res);
    }
  } else if (*eval) {
    vani::StageResult res;
    vani::EvalReport rep =
        vani::StageEval(cfg, in_path, gt_path, asr_path, emb_synth, emb_gt,
                        report_path, &res);
    PrintResult("eval", res);
    std::cout << rep.RenderTable();
  } else if (*report) {
    if (!in_path.empty())
      std::cout << vani::EvalReport::Load(in_path).RenderTable();
    else if (!gt_path.empty())
      std::cout << vani::RenderSummary(vani::LoadManifest(gt_path));
    else
      throw vani::Error("report needs --eval or --dataset");
  } else if (*pipeline) {
    auto man = [&](const std::string& name) {
      return cfg.ManifestDir() / (name + ".jsonl");
    };
    std::optional<std::filesystem::path> asr;
    if (!asr_path.empty()) asr = asr_path;
    if (preset == "track2") {
      PrintResult("clean", vani::StageClean(cfg, in_path, man("cleaned")));
      PrintResult("prune", vani::StagePrune(cfg, man("cleaned"), man("pruned"), asr));
      PrintResult("trim", vani::StageTrim(cfg, man("pruned"), man("trimmed")));
      PrintResult("normalize",
                  vani::StageNormalize(cfg, man("trimmed"), man("normalized")));
      PrintResult("featurize", vani::StageFeaturize(cfg, man("normalized")));
      PrintResult("train",
                  vani::StageTrain(cfg, man("normalized"),
                                   cfg.CheckpointDir() / "model.ckpt",
                                   cfg.CheckpointDir() / "loss_curve.csv"));
    } else if (preset == "track13" || preset == "track1" || preset == "track3") {
      PrintResult("clean", vani::StageClean(cfg, in_path, man("cleaned")));
      PrintResult("pair", vani::StagePair(cfg, man("cleaned"), man("parallel"),
                                          std::nullopt));
      PrintResult("budget", vani::StageBudget(cfg, man("parallel"), man("budgeted")));
      PrintResult("trim", vani::StageTrim(cfg, man("budgeted"), man("trimmed")));
      PrintResult("normalize",
                  vani::StageNormalize(cfg, man("trimmed"), man("normalized")));
      PrintResult("augment",
                  vani::StageAugment(cfg, man("normalized"), man("augmented"),
                                     parse_scales()));
      PrintResult("featurize", vani::StageFeaturize(cfg, man("augmented")));
      PrintResult("train",
                  vani::StageTrain(cfg, man("augmented"),
                                   cfg.CheckpointDir() / "model.ckpt",
                                   cfg.CheckpointDir() / "loss_curve.csv"));
    } else {
      throw vani::Error("unknown preset: " + preset + " (want track2|track13)");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
