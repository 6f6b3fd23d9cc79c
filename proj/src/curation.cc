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

#include "vani/curation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"
#include "vani/text.h"
#include "vani/util/error.h"
#include "vani/util/io.h"
#include "vani/util/parallel.h"
#include "vani/util/rng.h"
#include "vani/util/utf8.h"

namespace vani {

using Json = nlohmann::ordered_json;

void SelectionConfig::Validate() const {
  if (top_k_per_speaker <= 0) throw Error("top_k_per_speaker must be positive");
  if (budget_hours_per_speaker <= 0.0)
    throw Error("budget_hours_per_speaker must be positive");
  if (parallel_pairs_per_language <= 0)
    throw Error("parallel_pairs_per_language must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw Error("val_fraction must be in (0,1)");
}

namespace {

std::map<std::string, std::vector<const ClipRecord*>> BySpeaker(
    const DatasetManifest& m) {
  std::map<std::string, std::vector<const ClipRecord*>> out;
  for (const auto& r : m.records) out[r.speaker_id].push_back(&r);
  return out;
}

// Missing CER sorts last; ties break on clip_id.
bool CerLess(const ClipRecord* a, const ClipRecord* b) {
  double ca = a->cer.value_or(std::numeric_limits<double>::infinity());
  double cb = b->cer.value_or(std::numeric_limits<double>::infinity());
  if (ca != cb) return ca < cb;
  return a->clip_id < b->clip_id;
}

}  // namespace

DatasetManifest Clean(const DatasetManifest& m, const AudioProbe& probe,
                      std::vector<std::string>* dropped_log) {
  DatasetManifest out;
  out.split_tag = SplitTag::kCleaned;
  for (const auto& r : m.records) {
    int64_t samples = probe ? probe(r) : 1;
    if (samples <= 0) {
      if (dropped_log)
        dropped_log->push_back(r.clip_id +
                               (samples == 0 ? " (empty audio)" : " (unreadable)"));
      continue;
    }
    ClipRecord c = r;
    c.transcript_gt = NormalizeTranscript(c.transcript_gt);
    out.records.push_back(std::move(c));
  }
  std::set<std::string> dups;
  for (const auto& group : FindDuplicates(out))
    for (size_t i = 1; i < group.size(); ++i) dups.insert(group[i]);
  if (!dups.empty()) {
    std::vector<ClipRecord> kept;
    kept.reserve(out.records.size());
    for (auto& r : out.records) {
      if (dups.count(r.clip_id)) {
        if (dropped_log) dropped_log->push_back(r.clip_id + " (duplicate transcript)");
        continue;
      }
      kept.push_back(std::move(r));
    }
    out.records = std::move(kept);
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return out;
}

DatasetManifest PruneTopK(const DatasetManifest& m, const SelectionConfig& cfg) {
  cfg.Validate();
  DatasetManifest filled = m;
  for (auto& r : filled.records) {
    if (!r.transcript_asr)
      throw Error("missing ASR hypothesis for clip " + r.clip_id);
    if (!r.cer) r.cer = Cer(r.transcript_gt, *r.transcript_asr);
  }
  DatasetManifest out;
  out.split_tag = SplitTag::kPruned;
  for (auto& [speaker, records] : BySpeaker(filled)) {
    (void)speaker;
    std::vector<const ClipRecord*> sorted = records;
    std::sort(sorted.begin(), sorted.end(), CerLess);
    size_t keep = std::min<size_t>(sorted.size(), cfg.top_k_per_speaker);
    for (size_t i = 0; i < keep; ++i) out.records.push_back(*sorted[i]);
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return out;
}

std::vector<PromptPair> SelectParallel(const DatasetManifest& m,
                                       const SelectionConfig& cfg,
                                       const std::string& language,
                                       int threads) {
  cfg.Validate();
  std::map<std::string, std::vector<const ClipRecord*>> speakers;
  for (const auto& r : m.records)
    if (r.language == language) speakers[r.speaker_id].push_back(&r);
  if (speakers.empty()) throw Error("no records for language " + language);
  if (speakers.size() != 2)
    throw Error("parallel selection needs exactly 2 speakers in language " +
                language + ", found " + std::to_string(speakers.size()));

  auto it = speakers.begin();
  const std::vector<const ClipRecord*>& side_a = it->second;
  const std::vector<const ClipRecord*>& side_b = std::next(it)->second;

  struct Candidate {
    const ClipRecord* a;
    const ClipRecord* b;
    double cer;
  };

  // Length-ratio pruning: CER >= |len(a)-len(b)| / len(a), so a pair with
  // lengths more than 2x apart can never beat a same-length partner at the
  // front of the sorted candidate list unless transcripts are short anyway.
  std::vector<std::pair<const ClipRecord*, size_t>> la, lb;
  for (const auto* r : side_a) {
    size_t len = CodepointCount(NormalizeTranscript(r->transcript_gt));
    if (len > 0) la.push_back({r, len});
  }
  for (const auto* r : side_b) {
    size_t len = CodepointCount(NormalizeTranscript(r->transcript_gt));
    if (len > 0) lb.push_back({r, len});
  }

  std::vector<std::pair<size_t, size_t>> index_pairs;
  for (size_t i = 0; i < la.size(); ++i) {
    for (size_t j = 0; j < lb.size(); ++j) {
      size_t len_a = la[i].second, len_b = lb[j].second;
      size_t lo = std::min(len_a, len_b), hi = std::max(len_a, len_b);
      if (hi > 2 * lo) continue;
      index_pairs.push_back({i, j});
    }
  }

  std::vector<Candidate> candidates(index_pairs.size());
  ParallelFor(index_pairs.size(), threads, [&](size_t k) {
    auto [i, j] = index_pairs[k];
    candidates[k] = {la[i].first, lb[j].first,
                     Cer(la[i].first->transcript_gt, lb[j].first->transcript_gt)};
  });

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.cer != y.cer) return x.cer < y.cer;
              if (x.a->clip_id != y.a->clip_id) return x.a->clip_id < y.a->clip_id;
              return x.b->clip_id < y.b->clip_id;
            });

  std::set<std::string> used;
  std::vector<PromptPair> pairs;
  for (const auto& c : candidates) {
    if (static_cast<int>(pairs.size()) >= cfg.parallel_pairs_per_language) break;
    if (used.count(c.a->clip_id) || used.count(c.b->clip_id)) continue;
    used.insert(c.a->clip_id);
    used.insert(c.b->clip_id);
    pairs.push_back({c.a->clip_id, c.b->clip_id, c.cer});
  }
  return pairs;
}

DatasetManifest ApplyBudget(const DatasetManifest& m, const SelectionConfig& cfg,
                            std::vector<std::string>* warnings) {
  cfg.Validate();
  double budget_s = cfg.budget_hours_per_speaker * 3600.0;
  DatasetManifest out;
  out.split_tag = m.split_tag;
  for (auto& [speaker, records] : BySpeaker(m)) {
    std::vector<const ClipRecord*> sorted = records;
    std::sort(sorted.begin(), sorted.end(), CerLess);
    double used = 0.0;
    size_t kept = 0;
    for (const auto* r : sorted) {
      if (!(used + r->duration_s < budget_s)) break;
      used += r->duration_s;
      out.records.push_back(*r);
      ++kept;
    }
    if (kept == 0 && warnings)
      warnings->push_back("speaker " + speaker +
                          ": no clip fits within the duration budget");
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return out;
}

std::pair<DatasetManifest, DatasetManifest> SplitTrainVal(
    const DatasetManifest& m, const SelectionConfig& cfg, uint64_t seed) {
  cfg.Validate();
  DatasetManifest train, val;
  train.split_tag = SplitTag::kTrain;
  val.split_tag = SplitTag::kVal;
  for (auto& [speaker, records] : BySpeaker(m)) {
    std::vector<const ClipRecord*> sorted = records;
    std::sort(sorted.begin(), sorted.end(),
              [](const ClipRecord* a, const ClipRecord* b) {
                return a->clip_id < b->clip_id;
              });
    Rng rng(MixSeed(seed, Fnv1a(speaker)));
    rng.Shuffle(&sorted);
    size_t n = sorted.size();
    size_t n_val = 0;
    if (n >= 2) {
      n_val = static_cast<size_t>(std::llround(cfg.val_fraction * n));
      n_val = std::clamp<size_t>(n_val, 1, n - 1);
    }
    for (size_t i = 0; i < n; ++i)
      (i < n_val ? val : train).records.push_back(*sorted[i]);
  }
  auto by_id = [](const ClipRecord& a, const ClipRecord& b) {
    return a.clip_id < b.clip_id;
  };
  std::sort(train.records.begin(), train.records.end(), by_id);
  std::sort(val.records.begin(), val.records.end(), by_id);
  return {train, val};
}

void SavePromptPairs(const std::filesystem::path& path,
                     const std::string& language,
                     const std::vector<PromptPair>& pairs) {
  Json j;
  j["language"] = language;
  Json arr = Json::array();
  for (const auto& p : pairs) arr.push_back({p.clip_a, p.clip_b, p.pair_cer});
  j["pairs"] = arr;
  AtomicWriteFile(path, j.dump(2) + "\n");
}

std::pair<std::string, std::vector<PromptPair>> LoadPromptPairs(
    const std::filesystem::path& path) {
  Json j = Json::parse(ReadTextFile(path));
  std::vector<PromptPair> pairs;
  for (const auto& e : j.at("pairs")) {
    if (!e.is_array() || e.size() != 3)
      throw Error("prompt pair entries must be [clip_a, clip_b, cer]");
    pairs.push_back({e[0].get<std::string>(), e[1].get<std::string>(),
                     e[2].get<double>()});
  }
  return {j.at("language").get<std::string>(), pairs};
}

DatasetManifest ManifestFromPairs(const DatasetManifest& m,
                                  const std::vector<PromptPair>& pairs) {
  std::set<std::string> wanted;
  for (const auto& p : pairs) {
    wanted.insert(p.clip_a);
    wanted.insert(p.clip_b);
  }
  DatasetManifest out;
  out.split_tag = SplitTag::kParallel;
  for (const auto& r : m.records)
    if (wanted.count(r.clip_id)) out.records.push_back(r);
  return out;
}

}  // namespace vani
