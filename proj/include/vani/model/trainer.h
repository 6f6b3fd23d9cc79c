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

#ifndef VANI_MODEL_TRAINER_H_
#define VANI_MODEL_TRAINER_H_

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "vani/model/checkpoint.h"
#include "vani/model/net.h"

namespace vani {

struct LossRow {
  int step = 0;
  double nll = 0.0;
  double dur = 0.0;
  double f0 = 0.0;
  double energy = 0.0;

  double total(const ModelConfig& cfg) const {
    return nll + cfg.w_duration * dur + cfg.w_f0 * f0 + cfg.w_energy * energy;
  }
};

Checkpoint MakeCheckpoint(const VaniModel<float>& model);
void LoadIntoModel(const Checkpoint& ckpt, VaniModel<float>* model);
std::unique_ptr<VaniModel<float>> ModelFromCheckpoint(const Checkpoint& ckpt);

void SaveLossCurve(const std::vector<LossRow>& curve,
                   const std::filesystem::path& csv_path);
std::vector<LossRow> LoadLossCurve(const std::filesystem::path& csv_path);

// Single-threaded Adam training with global gradient-norm clipping.
// Batches are sampled statelessly from (seed, step), so a resumed run
// recomputes exactly the losses the uninterrupted run would have seen.
class Trainer {
 public:
  explicit Trainer(VaniModel<float>* model);

  // One optimizer step over a batch drawn from pool. Throws on a
  // non-finite loss before touching the parameters.
  LossRow RunStep(std::span<const TrainingExample<float>> pool);

  // Runs the configured number of steps and writes the checkpoint (with an
  // ".opt" optimizer sidecar) and the loss-curve CSV. On divergence the
  // last good parameters are saved before the error propagates.
  std::vector<LossRow> Train(std::span<const TrainingExample<float>> pool,
                             const std::filesystem::path& ckpt_path,
                             const std::filesystem::path& csv_path);

  void SaveState(const std::filesystem::path& ckpt_path) const;
  // Restores optimizer moments and the step counter from ckpt_path + ".opt".
  void RestoreState(const std::filesystem::path& ckpt_path);

  int step() const { return step_; }

 private:
  VaniModel<float>* model_;
  std::vector<Mat<float>> adam_m_;
  std::vector<Mat<float>> adam_v_;
  int step_ = 0;
};

}  // namespace vani

#endif  // VANI_MODEL_TRAINER_H_
