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

#include <fstream>

#include "testutil.h"
#include "vani/manifest.h"
#include "vani/util/error.h"
#include "vani/util/io.h"
#include "vani/util/rng.h"

using namespace vani;

namespace {

ClipRecord MakeRecord(const std::string& id, const std::string& speaker = "s1",
                      double dur = 1.0) {
  ClipRecord r;
  r.clip_id = id;
  r.audio_path = "audio/" + id + ".wav";
  r.speaker_id = speaker;
  r.language = "hi";
  r.accent_id = "hi";
  r.transcript_gt = "text " + id;
  r.duration_s = dur;
  return r;
}

}  // namespace

TEST_CASE("empty file loads as empty manifest") {
  testutil::TempDir tmp("manifest");
  auto path = tmp.path() / "empty.jsonl";
  AtomicWriteFile(path, "");
  DatasetManifest m = LoadManifest(path);
  CHECK(m.records.empty());
  CHECK(m.split_tag == SplitTag::kRaw);
}

TEST_CASE("two-line file loads sorted") {
  testutil::TempDir tmp("manifest");
  auto path = tmp.path() / "two.jsonl";
  std::string line_b =
      R"({"clip_id":"b","audio_path":"b.wav","speaker_id":"s","language":"hi","accent_id":"hi","transcript_gt":"x","duration_s":1.0})";
  std::string line_a =
      R"({"clip_id":"a","audio_path":"a.wav","speaker_id":"s","language":"hi","accent_id":"hi","transcript_gt":"y","duration_s":2.0})";
  AtomicWriteFile(path, line_b + "\n" + line_a + "\n");
  DatasetManifest m = LoadManifest(path);
  REQUIRE(m.records.size() == 2);
  CHECK(m.records[0].clip_id == "a");
  CHECK(m.records[1].clip_id == "b");
}

TEST_CASE("duplicate clip_id rejected with the id named") {
  testutil::TempDir tmp("manifest");
  auto path = tmp.path() / "dup.jsonl";
  std::string line =
      R"({"clip_id":"a","audio_path":"a.wav","speaker_id":"s","language":"hi","accent_id":"hi","transcript_gt":"x","duration_s":1.0})";
  AtomicWriteFile(path, line + "\n" + line + "\n");
  try {
    LoadManifest(path);
    FAIL("expected duplicate-id error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("duplicate clip_id: a") !=
          std::string::npos);
  }
}

TEST_CASE("parse errors carry line numbers") {
  testutil::TempDir tmp("manifest");
  auto path = tmp.path() / "bad.jsonl";
  AtomicWriteFile(path, "{not json}\n");
  try {
    LoadManifest(path);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
}

TEST_CASE("save/load round trip preserves records and tag") {
  testutil::TempDir tmp("manifest");
  auto path = tmp.path() / "round.jsonl";
  DatasetManifest m;
  m.split_tag = SplitTag::kTrain;
  m.records = {MakeRecord("c"), MakeRecord("a"), MakeRecord("b")};
  m.records[0].transcript_asr = "hyp";
  m.records[0].cer = 0.25;
  m.records[1].augmented_from = "zz";
  m.records[1].formant_scale = 1.1;
  SaveManifest(m, path);
  DatasetManifest loaded = LoadManifest(path);
  REQUIRE(loaded.records.size() == 3);
  CHECK(loaded.split_tag == SplitTag::kTrain);
  // Loaded records are the saved ones, sorted.
  DatasetManifest sorted = m;
  std::sort(sorted.records.begin(), sorted.records.end(),
            [](const ClipRecord& x, const ClipRecord& y) {
              return x.clip_id < y.clip_id;
            });
  CHECK(loaded == sorted);
}

TEST_CASE("rewrite is byte-identical") {
  testutil::TempDir tmp("manifest");
  auto p1 = tmp.path() / "a.jsonl";
  auto p2 = tmp.path() / "b.jsonl";
  DatasetManifest m;
  m.records = {MakeRecord("x", "s1", 1.5), MakeRecord("y", "s2", 2.25)};
  SaveManifest(m, p1);
  SaveManifest(LoadManifest(p1), p2);
  CHECK(ReadTextFile(p1) == ReadTextFile(p2));

  DatasetManifest empty;
  SaveManifest(empty, p1);
  SaveManifest(LoadManifest(p1), p2);
  CHECK(ReadTextFile(p1) == ReadTextFile(p2));
}

TEST_CASE("non-ASCII transcript survives the round trip") {
  testutil::TempDir tmp("manifest");
  auto path = tmp.path() / "devanagari.jsonl";
  DatasetManifest m;
  ClipRecord r = MakeRecord("d1");
  r.transcript_gt = "नमस्ते।";
  m.records = {r};
  SaveManifest(m, path);
  CHECK(LoadManifest(path).records[0].transcript_gt == "नमस्ते।");
}

TEST_CASE("augmented_from and formant_scale must pair up") {
  DatasetManifest m;
  ClipRecord r = MakeRecord("a");
  r.augmented_from = "b";  // no formant_scale
  m.records = {r};
  CHECK_THROWS_AS(ValidateManifest(m), Error);
  m.records[0].formant_scale = 1.0;  // scale of exactly 1.0 is not augmented
  CHECK_THROWS_AS(ValidateManifest(m), Error);
  m.records[0].formant_scale = 1.1;
  CHECK_NOTHROW(ValidateManifest(m));
}

TEST_CASE("summarize computes per-group files and hours") {
  DatasetManifest m;
  m.records = {MakeRecord("a", "s1", 1800.0), MakeRecord("b", "s1", 1800.0)};
  auto summary = Summarize(m);
  REQUIRE(summary.size() == 1);
  auto& g = summary[{"s1", "hi"}];
  CHECK(g.file_count == 2);
  CHECK(g.total_hours == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(Summarize(DatasetManifest{}).empty());
}

TEST_CASE("summarize matches exact sums on random manifests") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    DatasetManifest m;
    int n = 1 + static_cast<int>(rng.Below(200));
    long double exact = 0.0L;
    for (int i = 0; i < n; ++i) {
      double d = rng.Uniform(0.1, 30.0);
      exact += static_cast<long double>(d);
      m.records.push_back(MakeRecord("c" + std::to_string(i), "s", d));
    }
    auto summary = Summarize(m);
    double hours = summary[{"s", "hi"}].total_hours;
    double expected = static_cast<double>(exact / 3600.0L);
    CHECK(std::abs(hours - expected) <=
          1e-9 * std::max(1.0, std::abs(expected)));
  }
}
