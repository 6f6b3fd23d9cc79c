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

#ifndef VANI_MODEL_CONFIG_H_
#define VANI_MODEL_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace vani {

struct ModelConfig {
  int n_mels = 80;
  int d_txt = 192;
  int d_accent = 8;
  int d_speaker = 16;
  int n_flow_steps = 2;       // one forward pass, one backward pass
  int n_lstm_layers = 3;      // per flow step
  int lstm_hidden = 256;
  int predictor_hidden = 128;
  int conv_kernel = 5;
  int vocab_size = 256;
  int n_speakers = 8;
  int n_accents = 8;
  double temperature = 0.7;
  uint64_t seed = 1234;

  // Identity labels, index-aligned with the embedding tables. Empty lists
  // mean the table slots are anonymous (default-budget configuration).
  std::vector<std::string> speakers;
  std::vector<std::string> accents;

  // Training.
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-8;
  double grad_clip_norm = 1.0;
  int batch_size = 4;
  int train_steps = 300;
  double w_duration = 1.0;
  double w_f0 = 0.1;
  double w_energy = 0.1;

  void Validate() const;

  int SpeakerIndex(const std::string& id) const;
  int AccentIndex(const std::string& id) const;

  std::string ToJson() const;
  static ModelConfig FromJson(const std::string& json_text);
};

}  // namespace vani

#endif  // VANI_MODEL_CONFIG_H_
