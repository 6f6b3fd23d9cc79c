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

#include "vani/model/config.h"

#include <algorithm>

#include "json.hpp"
#include "vani/util/error.h"

namespace vani {

using Json = nlohmann::ordered_json;

void ModelConfig::Validate() const {
  if (n_mels <= 0 || d_txt <= 0 || d_accent <= 0 || d_speaker <= 0 ||
      lstm_hidden <= 0 || predictor_hidden <= 0)
    throw Error("model dimensions must be positive");
  if (n_flow_steps != 2)
    throw Error("the decoder uses exactly 2 flow steps (forward + backward)");
  if (n_lstm_layers != 3)
    throw Error("each flow step uses exactly 3 LSTM layers");
  if (conv_kernel % 2 != 1 || conv_kernel < 1)
    throw Error("conv_kernel must be odd");
  if (vocab_size < 4) throw Error("vocab_size must cover the reserved ids");
  if (n_speakers <= 0 || n_accents <= 0)
    throw Error("speaker/accent table sizes must be positive");
  if (!speakers.empty() && static_cast<int>(speakers.size()) > n_speakers)
    throw Error("more speaker labels than table slots");
  if (!accents.empty() && static_cast<int>(accents.size()) > n_accents)
    throw Error("more accent labels than table slots");
  if (temperature < 0.0) throw Error("temperature must be >= 0");
  if (batch_size <= 0 || train_steps < 0)
    throw Error("batch_size must be positive and train_steps >= 0");
}

int ModelConfig::SpeakerIndex(const std::string& id) const {
  auto it = std::find(speakers.begin(), speakers.end(), id);
  if (it == speakers.end()) throw Error("unknown speaker: " + id);
  return static_cast<int>(it - speakers.begin());
}

int ModelConfig::AccentIndex(const std::string& id) const {
  auto it = std::find(accents.begin(), accents.end(), id);
  if (it == accents.end()) throw Error("unknown accent: " + id);
  return static_cast<int>(it - accents.begin());
}

std::string ModelConfig::ToJson() const {
  Json j;
  j["n_mels"] = n_mels;
  j["d_txt"] = d_txt;
  j["d_accent"] = d_accent;
  j["d_speaker"] = d_speaker;
  j["n_flow_steps"] = n_flow_steps;
  j["n_lstm_layers"] = n_lstm_layers;
  j["lstm_hidden"] = lstm_hidden;
  j["predictor_hidden"] = predictor_hidden;
  j["conv_kernel"] = conv_kernel;
  j["vocab_size"] = vocab_size;
  j["n_speakers"] = n_speakers;
  j["n_accents"] = n_accents;
  j["temperature"] = temperature;
  j["seed"] = seed;
  j["speakers"] = speakers;
  j["accents"] = accents;
  j["learning_rate"] = learning_rate;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  j["grad_clip_norm"] = grad_clip_norm;
  j["batch_size"] = batch_size;
  j["train_steps"] = train_steps;
  j["w_duration"] = w_duration;
  j["w_f0"] = w_f0;
  j["w_energy"] = w_energy;
  return j.dump();
}

ModelConfig ModelConfig::FromJson(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw Error(std::string("bad model config JSON: ") + e.what());
  }
  ModelConfig c;
  auto get = [&](const char* key, auto* out) {
    if (j.contains(key)) *out = j.at(key).get<std::decay_t<decltype(*out)>>();
  };
  get("n_mels", &c.n_mels);
  get("d_txt", &c.d_txt);
  get("d_accent", &c.d_accent);
  get("d_speaker", &c.d_speaker);
  get("n_flow_steps", &c.n_flow_steps);
  get("n_lstm_layers", &c.n_lstm_layers);
  get("lstm_hidden", &c.lstm_hidden);
  get("predictor_hidden", &c.predictor_hidden);
  get("conv_kernel", &c.conv_kernel);
  get("vocab_size", &c.vocab_size);
  get("n_speakers", &c.n_speakers);
  get("n_accents", &c.n_accents);
  get("temperature", &c.temperature);
  get("seed", &c.seed);
  get("speakers", &c.speakers);
  get("accents", &c.accents);
  get("learning_rate", &c.learning_rate);
  get("adam_beta1", &c.adam_beta1);
  get("adam_beta2", &c.adam_beta2);
  get("adam_eps", &c.adam_eps);
  get("grad_clip_norm", &c.grad_clip_norm);
  get("batch_size", &c.batch_size);
  get("train_steps", &c.train_steps);
  get("w_duration", &c.w_duration);
  get("w_f0", &c.w_f0);
  get("w_energy", &c.w_energy);
  c.Validate();
  return c;
}

}  // namespace vani
