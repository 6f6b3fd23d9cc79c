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

#include "vani/model/trainer.h"

#include <cmath>
#include <cstdio>

#include "vani/util/error.h"
#include "vani/util/io.h"
#include "vani/util/rng.h"

namespace vani {

Checkpoint MakeCheckpoint(const VaniModel<float>& model) {
  Checkpoint ckpt;
  ckpt.config = model.config();
  const ParamSet<float>& params = model.params();
  for (size_t i = 0; i < params.count(); ++i)
    ckpt.tensors.emplace_back(params.at(i)->name, params.at(i)->value);
  return ckpt;
}

void LoadIntoModel(const Checkpoint& ckpt, VaniModel<float>* model) {
  ParamSet<float>& params = model->params();
  for (size_t i = 0; i < params.count(); ++i) {
    ParamTensor<float>* p = params.at(i);
    const Mat<float>* t = ckpt.Find(p->name);
    if (!t) throw Error("checkpoint is missing tensor " + p->name);
    if (t->rows != p->value.rows || t->cols != p->value.cols)
      throw Error("checkpoint tensor shape mismatch for " + p->name);
    p->value = *t;
  }
}

std::unique_ptr<VaniModel<float>> ModelFromCheckpoint(const Checkpoint& ckpt) {
  auto model = std::make_unique<VaniModel<float>>(ckpt.config);
  LoadIntoModel(ckpt, model.get());
  return model;
}

void SaveLossCurve(const std::vector<LossRow>& curve,
                   const std::filesystem::path& csv_path) {
  std::string out = "step,nll,dur_loss,f0_loss,energy_loss\n";
  char buf[160];
  for (const auto& r : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g\n", r.step, r.nll,
                  r.dur, r.f0, r.energy);
    out += buf;
  }
  if (csv_path.has_parent_path())
    std::filesystem::create_directories(csv_path.parent_path());
  AtomicWriteFile(csv_path, out);
}

std::vector<LossRow> LoadLossCurve(const std::filesystem::path& csv_path) {
  std::vector<LossRow> curve;
  for (const std::string& line : SplitLines(ReadTextFile(csv_path))) {
    LossRow r;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &r.step, &r.nll, &r.dur,
                    &r.f0, &r.energy) == 5)
      curve.push_back(r);
  }
  return curve;
}

Trainer::Trainer(VaniModel<float>* model) : model_(model) {
  ParamSet<float>& params = model_->params();
  for (size_t i = 0; i < params.count(); ++i) {
    const Mat<float>& v = params.at(i)->value;
    adam_m_.emplace_back(v.rows, v.cols);
    adam_v_.emplace_back(v.rows, v.cols);
  }
}

LossRow Trainer::RunStep(std::span<const TrainingExample<float>> pool) {
  if (pool.empty()) throw Error("empty training pool");
  const ModelConfig& cfg = model_->config();
  ParamSet<float>& params = model_->params();
  params.ZeroGrad();

  Rng rng(MixSeed(cfg.seed, static_cast<uint64_t>(step_)));
  int batch = std::min<int>(cfg.batch_size, static_cast<int>(pool.size()));

  LossRow row;
  row.step = step_;
  for (int b = 0; b < batch; ++b) {
    const TrainingExample<float>& ex = pool[rng.Below(pool.size())];
    Graph<float> g;
    auto refs = model_->BuildLoss(&g, ex);
    row.nll += g.ScalarValue(refs.nll) / batch;
    row.dur += g.ScalarValue(refs.dur) / batch;
    row.f0 += g.ScalarValue(refs.f0) / batch;
    row.energy += g.ScalarValue(refs.energy) / batch;
    g.Backward(g.Scale(refs.total, 1.0f / static_cast<float>(batch)));
  }
  if (!std::isfinite(row.total(cfg)))
    throw Error("training diverged: non-finite loss at step " +
                std::to_string(step_));

  // Global gradient-norm clip.
  double norm_sq = 0.0;
  for (size_t i = 0; i < params.count(); ++i)
    for (float gv : params.at(i)->grad.v)
      norm_sq += static_cast<double>(gv) * gv;
  double norm = std::sqrt(norm_sq);
  float scale = 1.0f;
  if (cfg.grad_clip_norm > 0.0 && norm > cfg.grad_clip_norm)
    scale = static_cast<float>(cfg.grad_clip_norm / norm);

  // Adam with bias correction.
  int t = step_ + 1;
  double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  double bc1 = 1.0 - std::pow(b1, t);
  double bc2 = 1.0 - std::pow(b2, t);
  for (size_t i = 0; i < params.count(); ++i) {
    ParamTensor<float>* p = params.at(i);
    Mat<float>& m = adam_m_[i];
    Mat<float>& v = adam_v_[i];
    for (size_t k = 0; k < p->value.size(); ++k) {
      double gk = static_cast<double>(p->grad.v[k]) * scale;
      double mk = b1 * m.v[k] + (1.0 - b1) * gk;
      double vk = b2 * v.v[k] + (1.0 - b2) * gk * gk;
      m.v[k] = static_cast<float>(mk);
      v.v[k] = static_cast<float>(vk);
      double update = cfg.learning_rate * (mk / bc1) /
                      (std::sqrt(vk / bc2) + cfg.adam_eps);
      p->value.v[k] = static_cast<float>(p->value.v[k] - update);
    }
  }
  ++step_;
  return row;
}

std::vector<LossRow> Trainer::Train(
    std::span<const TrainingExample<float>> pool,
    const std::filesystem::path& ckpt_path,
    const std::filesystem::path& csv_path) {
  const ModelConfig& cfg = model_->config();
  std::vector<LossRow> curve;
  for (int s = step_; s < cfg.train_steps; ++s) {
    try {
      curve.push_back(RunStep(pool));
    } catch (const Error&) {
      SaveState(ckpt_path);  // RunStep leaves the last good parameters
      SaveLossCurve(curve, csv_path);
      throw;
    }
  }
  SaveState(ckpt_path);
  SaveLossCurve(curve, csv_path);
  return curve;
}

void Trainer::SaveState(const std::filesystem::path& ckpt_path) const {
  if (ckpt_path.has_parent_path())
    std::filesystem::create_directories(ckpt_path.parent_path());
  SaveCheckpoint(MakeCheckpoint(*model_), ckpt_path);

  Checkpoint opt;
  opt.config = model_->config();
  const ParamSet<float>& params = model_->params();
  for (size_t i = 0; i < params.count(); ++i) {
    opt.tensors.emplace_back("opt.m." + params.at(i)->name, adam_m_[i]);
    opt.tensors.emplace_back("opt.v." + params.at(i)->name, adam_v_[i]);
  }
  Mat<float> step_mat(1, 1);
  step_mat.v[0] = static_cast<float>(step_);
  opt.tensors.emplace_back("opt.step", step_mat);
  std::filesystem::path opt_path = ckpt_path;
  opt_path += ".opt";
  SaveCheckpoint(opt, opt_path);
}

void Trainer::RestoreState(const std::filesystem::path& ckpt_path) {
  std::filesystem::path opt_path = ckpt_path;
  opt_path += ".opt";
  Checkpoint opt = LoadCheckpoint(opt_path);
  ParamSet<float>& params = model_->params();
  for (size_t i = 0; i < params.count(); ++i) {
    const Mat<float>* m = opt.Find("opt.m." + params.at(i)->name);
    const Mat<float>* v = opt.Find("opt.v." + params.at(i)->name);
    if (!m || !v) throw Error("optimizer sidecar is missing moments for " +
                              params.at(i)->name);
    adam_m_[i] = *m;
    adam_v_[i] = *v;
  }
  const Mat<float>* s = opt.Find("opt.step");
  if (!s) throw Error("optimizer sidecar is missing the step counter");
  step_ = static_cast<int>(s->v[0]);
}

}  // namespace vani
