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

#include "vani/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vani/text.h"
#include "vani/util/error.h"
#include "vani/util/io.h"

namespace vani {

using Json = nlohmann::ordered_json;

void EmbeddingSet::Insert(const std::string& clip_id, std::vector<float> vec) {
  if (vec.empty()) throw Error("empty embedding for " + clip_id);
  for (float v : vec)
    if (!std::isfinite(v)) throw Error("non-finite embedding for " + clip_id);
  if (dim == 0) dim = static_cast<int>(vec.size());
  if (static_cast<int>(vec.size()) != dim)
    throw Error("embedding dimension mismatch for " + clip_id);
  entries[clip_id] = std::move(vec);
}

void EmbeddingSet::Save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& [id, vec] : entries) {
    Json j;
    j["clip_id"] = id;
    j["dim"] = dim;
    j["vector"] = vec;
    out += j.dump();
    out += '\n';
  }
  AtomicWriteFile(path, out);
}

EmbeddingSet EmbeddingSet::Load(const std::filesystem::path& path) {
  EmbeddingSet set;
  int line_no = 0;
  for (const std::string& line : SplitLines(ReadTextFile(path))) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(path.filename().string() + ":" + std::to_string(line_no) +
                  ": " + e.what());
    }
    set.Insert(j.at("clip_id").get<std::string>(),
               j.at("vector").get<std::vector<float>>());
  }
  return set;
}

double CosineSimilarity(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw Error("cosine: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu <= 0.0 || nv <= 0.0) throw Error("cosine: zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::map<std::string, double> SpeakerSimilarity(
    const EmbeddingSet& synth, const EmbeddingSet& gt,
    const std::map<std::string, std::string>& speaker_of) {
  // Per-speaker GT centroids.
  std::map<std::string, std::pair<std::vector<double>, int>> centroid_acc;
  for (const auto& [clip_id, vec] : gt.entries) {
    auto it = speaker_of.find(clip_id);
    if (it == speaker_of.end()) continue;
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

  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& [clip_id, vec] : synth.entries) {
    auto it = speaker_of.find(clip_id);
    if (it == speaker_of.end())
      throw Error("no speaker mapping for synthesized clip " + clip_id);
    auto ct = centroid.find(it->second);
    if (ct == centroid.end())
      throw Error("no ground-truth embeddings for speaker " + it->second);
    auto& [sum, n] = sums[it->second];
    sum += CosineSimilarity(vec, ct->second);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [spk, sum_n] : sums)
    out[spk] = sum_n.first / sum_n.second;
  return out;
}

std::map<std::string, double> CerEval(const DatasetManifest& hyp,
                                      const DatasetManifest& gt) {
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& g : gt.records) {
    const ClipRecord* h = hyp.Find(g.clip_id);
    if (!h) throw Error("no hypothesis for clip " + g.clip_id);
    auto& [sum, n] = sums[g.speaker_id];
    sum += Cer(g.transcript_gt, h->transcript_gt);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [spk, sum_n] : sums) out[spk] = sum_n.first / sum_n.second;
  return out;
}

std::map<std::string, std::string> LoadAsrHypotheses(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  for (const std::string& line : SplitLines(ReadTextFile(path))) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(path.filename().string() + ":" + std::to_string(line_no) +
                  ": " + e.what());
    }
    out[j.at("clip_id").get<std::string>()] =
        j.at("transcript_asr").get<std::string>();
  }
  return out;
}

std::string EvalTaskName(EvalTask task) {
  return task == EvalTask::kResynthesis ? "resynthesis" : "transfer";
}

std::string PromptAssignment::SynthClipId() const {
  return speaker_id + "__" + prompt_id;
}

std::vector<PromptSpec> LoadPrompts(const std::filesystem::path& path) {
  std::vector<PromptSpec> out;
  int line_no = 0;
  for (const std::string& line : SplitLines(ReadTextFile(path))) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(path.filename().string() + ":" + std::to_string(line_no) +
                  ": " + e.what());
    }
    PromptSpec p;
    p.prompt_id = j.at("prompt_id").get<std::string>();
    p.language = j.at("language").get<std::string>();
    p.accent_id = j.at("accent_id").get<std::string>();
    p.text = j.at("text").get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

void SavePrompts(std::span<const PromptSpec> prompts,
                 const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : prompts) {
    Json j;
    j["prompt_id"] = p.prompt_id;
    j["language"] = p.language;
    j["accent_id"] = p.accent_id;
    j["text"] = p.text;
    out += j.dump();
    out += '\n';
  }
  AtomicWriteFile(path, out);
}

std::vector<PromptAssignment> BuildProtocol(
    std::span<const PromptSpec> prompts,
    const std::map<std::string, std::string>& speaker_language, EvalTask task,
    int prompts_per_speaker, std::vector<std::string>* warnings) {
  std::vector<PromptSpec> sorted(prompts.begin(), prompts.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const PromptSpec& a, const PromptSpec& b) {
              return a.prompt_id < b.prompt_id;
            });
  std::vector<PromptAssignment> plan;
  for (const auto& [speaker, language] : speaker_language) {
    int taken = 0;
    for (const auto& p : sorted) {
      if (taken >= prompts_per_speaker) break;
      bool own = p.language == language;
      if ((task == EvalTask::kResynthesis) != own) continue;
      PromptAssignment a;
      a.prompt_id = p.prompt_id;
      a.speaker_id = speaker;
      a.accent_id = p.accent_id;
      a.language = p.language;
      a.text = p.text;
      a.task = task;
      plan.push_back(std::move(a));
      ++taken;
    }
    if (taken < prompts_per_speaker && warnings)
      warnings->push_back("protocol size mismatch: speaker " + speaker +
                          " has " + std::to_string(taken) + "/" +
                          std::to_string(prompts_per_speaker) + " " +
                          EvalTaskName(task) + " prompts");
  }
  return plan;
}

EvalReport AssembleReport(std::span<const PromptAssignment> plan,
                          const std::map<std::string, double>& cer_of,
                          const std::map<std::string, double>& cos_of) {
  std::map<std::pair<std::string, int>, EvalRow> rows;
  double cer_sum = 0.0, cos_sum = 0.0;
  int cer_n = 0, cos_n = 0;
  for (const auto& a : plan) {
    auto key = std::make_pair(a.speaker_id, static_cast<int>(a.task));
    EvalRow& row = rows[key];
    row.speaker_id = a.speaker_id;
    row.task = a.task;
    ++row.n_prompts;
    std::string id = a.SynthClipId();
    auto c = cer_of.find(id);
    if (c != cer_of.end()) {
      row.mean_cer += c->second;
      cer_sum += c->second;
      ++cer_n;
    }
    auto s = cos_of.find(id);
    if (s != cos_of.end()) {
      row.mean_cosine += s->second;
      cos_sum += s->second;
      ++cos_n;
    }
  }
  EvalReport report;
  for (auto& [key, row] : rows) {
    if (row.n_prompts > 0) {
      row.mean_cer /= row.n_prompts;
      row.mean_cosine /= row.n_prompts;
    }
    report.rows.push_back(row);
  }
  report.overall_cer = cer_n > 0 ? cer_sum / cer_n : 0.0;
  report.overall_cosine = cos_n > 0 ? cos_sum / cos_n : 0.0;
  return report;
}

void EvalReport::Save(const std::filesystem::path& path) const {
  Json j;
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json row;
    row["speaker_id"] = r.speaker_id;
    row["task"] = EvalTaskName(r.task);
    row["mean_cer"] = r.mean_cer;
    row["mean_cosine"] = r.mean_cosine;
    row["n_prompts"] = r.n_prompts;
    arr.push_back(row);
  }
  j["rows"] = arr;
  j["overall_cer"] = overall_cer;
  j["overall_cosine"] = overall_cosine;
  AtomicWriteFile(path, j.dump(2) + "\n");
}

EvalReport EvalReport::Load(const std::filesystem::path& path) {
  Json j = Json::parse(ReadTextFile(path));
  EvalReport report;
  for (const auto& row : j.at("rows")) {
    EvalRow r;
    r.speaker_id = row.at("speaker_id").get<std::string>();
    r.task = row.at("task").get<std::string>() == "transfer"
                 ? EvalTask::kTransfer
                 : EvalTask::kResynthesis;
    r.mean_cer = row.at("mean_cer").get<double>();
    r.mean_cosine = row.at("mean_cosine").get<double>();
    r.n_prompts = row.at("n_prompts").get<int>();
    report.rows.push_back(r);
  }
  report.overall_cer = j.at("overall_cer").get<double>();
  report.overall_cosine = j.at("overall_cosine").get<double>();
  return report;
}

std::string EvalReport::RenderTable() const {
  std::ostringstream os;
  os << "speaker         task          Cosine SIM (^)  CER (v)   prompts\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-15s %-13s %-15.4f %-9.4f %d\n",
                  r.speaker_id.c_str(), EvalTaskName(r.task).c_str(),
                  r.mean_cosine, r.mean_cer, r.n_prompts);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-15s %-13s %-15.4f %-9.4f\n", "overall", "",
                overall_cosine, overall_cer);
  os << buf;
  return os.str();
}

}  // namespace vani
