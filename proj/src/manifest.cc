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

#include "vani/manifest.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vani/util/error.h"
#include "vani/util/io.h"
#include "vani/util/numeric.h"

namespace vani {

using Json = nlohmann::ordered_json;

std::string SplitTagName(SplitTag tag) {
  switch (tag) {
    case SplitTag::kRaw: return "raw";
    case SplitTag::kCleaned: return "cleaned";
    case SplitTag::kPruned: return "pruned";
    case SplitTag::kParallel: return "parallel";
    case SplitTag::kTrain: return "train";
    case SplitTag::kVal: return "val";
  }
  return "raw";
}

SplitTag ParseSplitTag(const std::string& name) {
  for (SplitTag t : {SplitTag::kRaw, SplitTag::kCleaned, SplitTag::kPruned,
                     SplitTag::kParallel, SplitTag::kTrain, SplitTag::kVal}) {
    if (SplitTagName(t) == name) return t;
  }
  throw Error("unknown split tag: " + name);
}

const ClipRecord* DatasetManifest::Find(const std::string& clip_id) const {
  auto it = std::lower_bound(
      records.begin(), records.end(), clip_id,
      [](const ClipRecord& r, const std::string& id) { return r.clip_id < id; });
  if (it != records.end() && it->clip_id == clip_id) return &*it;
  // Fall back to a linear scan in case the caller holds an unsorted manifest.
  for (const auto& r : records)
    if (r.clip_id == clip_id) return &r;
  return nullptr;
}

namespace {

void ValidateRecord(const ClipRecord& r, const std::string& where) {
  if (r.clip_id.empty()) throw Error(where + ": empty clip_id");
  if (!(r.duration_s > 0.0))
    throw Error(where + ": duration_s must be > 0 (clip " + r.clip_id + ")");
  if (r.cer && *r.cer < 0.0)
    throw Error(where + ": cer must be >= 0 (clip " + r.clip_id + ")");
  bool has_aug = r.augmented_from.has_value();
  bool has_scale = r.formant_scale && *r.formant_scale != 1.0;
  if (r.formant_scale && *r.formant_scale <= 0.0)
    throw Error(where + ": formant_scale must be positive (clip " + r.clip_id +
                ")");
  if (has_aug != has_scale)
    throw Error(where +
                ": augmented_from and formant_scale != 1.0 must appear "
                "together (clip " +
                r.clip_id + ")");
}

Json RecordToJson(const ClipRecord& r) {
  Json j;
  j["clip_id"] = r.clip_id;
  j["audio_path"] = r.audio_path;
  j["speaker_id"] = r.speaker_id;
  j["language"] = r.language;
  j["accent_id"] = r.accent_id;
  j["transcript_gt"] = r.transcript_gt;
  if (r.transcript_asr) j["transcript_asr"] = *r.transcript_asr;
  if (r.cer) j["cer"] = *r.cer;
  j["duration_s"] = r.duration_s;
  if (r.augmented_from) j["augmented_from"] = *r.augmented_from;
  if (r.formant_scale) j["formant_scale"] = *r.formant_scale;
  return j;
}

ClipRecord RecordFromJson(const Json& j, const std::string& where) {
  ClipRecord r;
  try {
    r.clip_id = j.at("clip_id").get<std::string>();
    r.audio_path = j.at("audio_path").get<std::string>();
    r.speaker_id = j.at("speaker_id").get<std::string>();
    r.language = j.at("language").get<std::string>();
    r.accent_id = j.at("accent_id").get<std::string>();
    r.transcript_gt = j.at("transcript_gt").get<std::string>();
    if (j.contains("transcript_asr"))
      r.transcript_asr = j.at("transcript_asr").get<std::string>();
    if (j.contains("cer")) r.cer = j.at("cer").get<double>();
    r.duration_s = j.at("duration_s").get<double>();
    if (j.contains("augmented_from"))
      r.augmented_from = j.at("augmented_from").get<std::string>();
    if (j.contains("formant_scale"))
      r.formant_scale = j.at("formant_scale").get<double>();
  } catch (const Json::exception& e) {
    throw Error(where + ": malformed record: " + e.what());
  }
  ValidateRecord(r, where);
  return r;
}

}  // namespace

void ValidateManifest(const DatasetManifest& m) {
  std::set<std::string> seen;
  for (const auto& r : m.records) {
    ValidateRecord(r, "manifest");
    if (!seen.insert(r.clip_id).second)
      throw Error("duplicate clip_id: " + r.clip_id);
  }
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  std::string text = ReadTextFile(path);
  DatasetManifest m;
  std::set<std::string> seen;
  int line_no = 0;
  for (const std::string& line : SplitLines(text)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = path.filename().string() + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(where + ": parse error: " + e.what());
    }
    if (!j.is_object()) throw Error(where + ": expected a JSON object");
    if (line_no == 1 && j.contains("split_tag") && !j.contains("clip_id")) {
      m.split_tag = ParseSplitTag(j.at("split_tag").get<std::string>());
      continue;
    }
    ClipRecord r = RecordFromJson(j, where);
    if (!seen.insert(r.clip_id).second)
      throw Error(where + ": duplicate clip_id: " + r.clip_id);
    m.records.push_back(std::move(r));
  }
  std::sort(m.records.begin(), m.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return m;
}

void SaveManifest(const DatasetManifest& m, const std::filesystem::path& path) {
  DatasetManifest copy = m;
  std::sort(copy.records.begin(), copy.records.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  ValidateManifest(copy);
  std::string out;
  {
    Json header;
    header["split_tag"] = SplitTagName(copy.split_tag);
    out += header.dump();
    out += '\n';
  }
  for (const auto& r : copy.records) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  AtomicWriteFile(path, out);
}

std::map<std::pair<std::string, std::string>, GroupSummary> Summarize(
    const DatasetManifest& m) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> durations;
  for (const auto& r : m.records)
    durations[{r.speaker_id, r.language}].push_back(r.duration_s);
  std::map<std::pair<std::string, std::string>, GroupSummary> out;
  for (const auto& [key, ds] : durations) {
    GroupSummary g;
    g.file_count = static_cast<int64_t>(ds.size());
    g.total_hours = PairwiseSum(std::span<const double>(ds)) / 3600.0;
    out[key] = g;
  }
  return out;
}

std::string RenderSummary(const DatasetManifest& m) {
  std::ostringstream os;
  os << "speaker\tlanguage\tfiles\thours\n";
  for (const auto& [key, g] : Summarize(m)) {
    os << key.first << '\t' << key.second << '\t' << g.file_count << '\t';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", g.total_hours);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace vani
