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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "testutil.h"
#include "vani/model/trainer.h"
#include "vani/pipeline.h"
#include "vani/util/rng.h"

using namespace vani;

namespace {

// Synthetic examples with mild temporal structure, built without audio.
std::vector<TrainingExample<float>> SyntheticPool(const ModelConfig& cfg,
                                                  int n, int frames,
                                                  uint64_t seed,
                                                  int tokens_per_clip = 4,
                                                  int fixed_duration = 0) {
  std::vector<TrainingExample<float>> pool;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    TrainingExample<float> ex;
    ex.tokens.ids.push_back(SymbolTable::kBos);
    for (int t = 0; t < tokens_per_clip - 2; ++t)
      ex.tokens.ids.push_back(
          4 + static_cast<int>(rng.Below(cfg.vocab_size - 4)));
    ex.tokens.ids.push_back(SymbolTable::kEos);
    int tlen = ex.tokens.length();

    int F = fixed_duration > 0 ? tlen * fixed_duration : frames;
    ex.durations.assign(tlen, F / tlen);
    for (int k = 0; k < F % tlen; ++k) ++ex.durations[k];

    ex.accent_idx = static_cast<int>(rng.Below(cfg.n_accents));
    ex.speaker_idx = static_cast<int>(rng.Below(cfg.n_speakers));
    ex.mel = Mat<float>(cfg.n_mels, F);
    double phase = rng.Uniform(0, 6.28);
    for (int r = 0; r < cfg.n_mels; ++r)
      for (int t = 0; t < F; ++t)
        ex.mel(r, t) = static_cast<float>(
            -6.0 + 3.0 * std::sin(0.3 * t + phase) * std::cos(0.2 * r));
    ex.f0_hz.resize(F);
    ex.energy.resize(F);
    for (int t = 0; t < F; ++t) {
      ex.f0_hz[t] = static_cast<float>(120.0 + 40.0 * std::sin(0.1 * t));
      double acc = 0.0;
      for (int r = 0; r < cfg.n_mels; ++r) acc += ex.mel(r, t);
      ex.energy[t] = static_cast<float>(acc / cfg.n_mels);
    }
    pool.push_back(std::move(ex));
  }
  return pool;
}

}  // namespace

TEST_CASE("nll falls on a fixed batch and the curve is deterministic") {
  ModelConfig cfg = testutil::TinyModelConfig(8);
  cfg.vocab_size = 12;
  cfg.train_steps = 200;
  cfg.batch_size = 2;
  cfg.seed = 77;

  auto pool = SyntheticPool(cfg, 2, 12, 7);

  auto run = [&]() {
    VaniModel<float> model(cfg);
    Trainer trainer(&model);
    std::vector<LossRow> curve;
    for (int s = 0; s < cfg.train_steps; ++s)
      curve.push_back(trainer.RunStep(pool));
    return curve;
  };
  std::vector<LossRow> curve = run();
  REQUIRE(curve.size() == 200);
  CHECK(curve.back().nll < 0.8 * curve.front().nll);

  // Bit-for-bit repeatability.
  std::vector<LossRow> curve2 = run();
  for (size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].nll == curve2[i].nll);
    CHECK(curve[i].dur == curve2[i].dur);
    CHECK(curve[i].f0 == curve2[i].f0);
    CHECK(curve[i].energy == curve2[i].energy);
  }
}

TEST_CASE("duration predictor learns a constant duration of 2") {
  ModelConfig cfg = testutil::TinyModelConfig(4);
  cfg.vocab_size = 10;
  cfg.train_steps = 300;
  cfg.batch_size = 4;
  cfg.seed = 13;
  cfg.learning_rate = 1e-2;  // the tiny predictor benefits from a hot rate

  auto pool = SyntheticPool(cfg, 12, 0, 99, 5, /*fixed_duration=*/2);
  VaniModel<float> model(cfg);
  Trainer trainer(&model);
  for (int s = 0; s < cfg.train_steps; ++s) trainer.RunStep(pool);

  double mean_pred = 0.0;
  int count = 0;
  for (const auto& ex : pool) {
    Mat<float> phi = model.EncodeText(ex.tokens);
    auto attrs = model.PredictAttributes(phi, ex.accent_idx, ex.speaker_idx);
    for (float d : attrs.duration_raw) {
      mean_pred += d;
      ++count;
    }
  }
  mean_pred /= count;
  MESSAGE("mean predicted duration: ", mean_pred);
  CHECK(mean_pred >= 1.6);
  CHECK(mean_pred <= 2.4);
}

TEST_CASE("resume reproduces the next loss bit for bit") {
  testutil::TempDir tmp("resume");
  ModelConfig cfg = testutil::TinyModelConfig(4);
  cfg.vocab_size = 10;
  cfg.batch_size = 2;
  cfg.seed = 5;

  auto pool = SyntheticPool(cfg, 4, 10, 55);

  VaniModel<float> model(cfg);
  Trainer trainer(&model);
  for (int s = 0; s < 5; ++s) trainer.RunStep(pool);
  auto ckpt_path = tmp.path() / "model.ckpt";
  trainer.SaveState(ckpt_path);
  LossRow next = trainer.RunStep(pool);

  // Fresh model restored from disk.
  Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  auto model2 = ModelFromCheckpoint(ckpt);
  Trainer trainer2(model2.get());
  trainer2.RestoreState(ckpt_path);
  CHECK(trainer2.step() == 5);
  LossRow resumed = trainer2.RunStep(pool);
  CHECK(resumed.nll == next.nll);
  CHECK(resumed.dur == next.dur);
  CHECK(resumed.f0 == next.f0);
  CHECK(resumed.energy == next.energy);
}

TEST_CASE("divergence aborts with an error") {
  ModelConfig cfg = testutil::TinyModelConfig(2);
  cfg.batch_size = 1;
  auto pool = SyntheticPool(cfg, 1, 6, 3);
  VaniModel<float> model(cfg);
  // A wildly wrong mu bias overflows z^2 to inf.
  model.params().Get("flow0.head.b")->value.v[0] = 1e30f;
  Trainer trainer(&model);
  CHECK_THROWS_AS(trainer.RunStep(pool), Error);
}

TEST_CASE("loss curve CSV round trips") {
  testutil::TempDir tmp("csv");
  std::vector<LossRow> curve = {{0, 2.5, 0.4, 0.1, 0.05},
                                {1, 2.25, 0.35, 0.09, 0.04}};
  auto path = tmp.path() / "loss.csv";
  SaveLossCurve(curve, path);
  auto loaded = LoadLossCurve(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[1].nll == doctest::Approx(2.25));
  CHECK(loaded[0].step == 0);
}
