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

#include <map>

#include "testutil.h"
#include "vani/text.h"
#include "vani/util/error.h"
#include "vani/util/rng.h"
#include "vani/util/utf8.h"

using namespace vani;

namespace {

// Recursive definition of Levenshtein distance, memoized. Independent of
// the iterative implementation under test.
int64_t RecursiveEditDistance(const std::vector<uint32_t>& a,
                              const std::vector<uint32_t>& b, size_t i,
                              size_t j, std::map<std::pair<size_t, size_t>,
                                                 int64_t>* memo) {
  if (i == 0) return static_cast<int64_t>(j);
  if (j == 0) return static_cast<int64_t>(i);
  auto key = std::make_pair(i, j);
  auto it = memo->find(key);
  if (it != memo->end()) return it->second;
  int64_t del = RecursiveEditDistance(a, b, i - 1, j, memo) + 1;
  int64_t ins = RecursiveEditDistance(a, b, i, j - 1, memo) + 1;
  int64_t sub = RecursiveEditDistance(a, b, i - 1, j - 1, memo) +
                (a[i - 1] == b[j - 1] ? 0 : 1);
  int64_t d = std::min({del, ins, sub});
  (*memo)[key] = d;
  return d;
}

int64_t OracleEditDistance(std::string_view x, std::string_view y) {
  std::vector<uint32_t> a = DecodeUtf8(x);
  std::vector<uint32_t> b = DecodeUtf8(y);
  std::map<std::pair<size_t, size_t>, int64_t> memo;
  return RecursiveEditDistance(a, b, a.size(), b.size(), &memo);
}

std::string RandomString(Rng* rng, int max_len, const std::string& alphabet) {
  int len = static_cast<int>(rng->Below(max_len + 1));
  std::string s;
  for (int i = 0; i < len; ++i) s += alphabet[rng->Below(alphabet.size())];
  return s;
}

}  // namespace

TEST_CASE("normalize fixes separators, newlines, whitespace") {
  CHECK(NormalizeTranscript("नमस्ते|") == "नमस्ते।");
  CHECK(NormalizeTranscript("a\nb") == "a b");
  CHECK(NormalizeTranscript("  x  ") == "x");
  CHECK(NormalizeTranscript("a\r\n\tb   c") == "a b c");
  CHECK(NormalizeTranscript("") == "");
}

TEST_CASE("normalize is idempotent on random strings") {
  Rng rng(7);
  std::vector<uint32_t> pool = {'a', 'b',    'c',    ' ',    '\n',  '\t',
                                '|', 0x0928, 0x092E, 0x0947, 0x094D, 0x0964,
                                'e', 0x0301, 0x00E9, 0x0C15, 0x0C3E};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<uint32_t> cps;
    int len = static_cast<int>(rng.Below(12));
    for (int i = 0; i < len; ++i) cps.push_back(pool[rng.Below(pool.size())]);
    std::string s = EncodeUtf8(cps);
    std::string once = NormalizeTranscript(s);
    CHECK(NormalizeTranscript(once) == once);
  }
}

TEST_CASE("NFC composes combining sequences") {
  // 'e' + COMBINING ACUTE ACCENT composes to U+00E9.
  std::string decomposed = "e\xcc\x81";
  CHECK(NormalizeTranscript(decomposed) == "\xc3\xa9");
}

TEST_CASE("edit distance basics") {
  CHECK(EditDistance("abc", "abc") == 0);
  CHECK(EditDistance("kitten", "sitting") == 3);
  CHECK(EditDistance("ab", "") == 2);
  CHECK(EditDistance("", "ab") == 2);
  // Unicode scalars count as single symbols.
  CHECK(EditDistance("नमस्ते", "नमस्ते") == 0);
  CHECK(EditDistance("क", "ख") == 1);
}

TEST_CASE("edit distance matches the recursive oracle exhaustively") {
  // All pairs of strings over {a,b,c} with length <= 4 here; the acceptance
  // suite extends to length 6.
  std::vector<std::string> all{""};
  std::string alpha = "abc";
  size_t start = 0;
  for (int len = 1; len <= 4; ++len) {
    size_t end = all.size();
    for (size_t i = start; i < end; ++i)
      for (char c : alpha) all.push_back(all[i] + c);
    start = end;
  }
  for (const auto& x : all)
    for (const auto& y : all)
      REQUIRE(EditDistance(x, y) == OracleEditDistance(x, y));
}

TEST_CASE("edit distance satisfies metric axioms on random strings") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::string a = RandomString(&rng, 8, "abc");
    std::string b = RandomString(&rng, 8, "abc");
    std::string c = RandomString(&rng, 8, "abc");
    int64_t ab = EditDistance(a, b);
    CHECK(EditDistance(a, a) == 0);
    CHECK(ab == EditDistance(b, a));
    CHECK(ab <= EditDistance(a, c) + EditDistance(c, b));
    if (a != b) CHECK(ab > 0);
  }
}

TEST_CASE("cer normalizes and divides by reference length") {
  CHECK(Cer("abc", "abc") == doctest::Approx(0.0));
  CHECK(Cer("kitten", "sitting") == doctest::Approx(0.5));
  CHECK_THROWS_AS(Cer("", "x"), Error);
  CHECK_THROWS_AS(Cer("   ", "x"), Error);
  // Separator fix applies to both sides, so it never counts as an error.
  CHECK(Cer("नमस्ते।", "नमस्ते|") == doctest::Approx(0.0));
  // CER may exceed 1 when the hypothesis is much longer.
  CHECK(Cer("a", "xyz") > 1.0);
}

TEST_CASE("find_duplicates groups by normalized transcript") {
  DatasetManifest m;
  auto rec = [](const std::string& id, const std::string& text) {
    ClipRecord r;
    r.clip_id = id;
    r.audio_path = id + ".wav";
    r.speaker_id = "s";
    r.language = "hi";
    r.accent_id = "hi";
    r.transcript_gt = text;
    r.duration_s = 1.0;
    return r;
  };
  m.records = {rec("b", "a\nb"), rec("a", "a b"), rec("c", "distinct")};
  auto groups = FindDuplicates(m);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0] == std::vector<std::string>{"a", "b"});

  m.records = {rec("x", "t"), rec("y", "u"), rec("z", "v")};
  CHECK(FindDuplicates(m).empty());

  m.records = {rec("p", "same"), rec("q", "same"), rec("r", "same")};
  groups = FindDuplicates(m);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].size() == 3);
  CHECK(groups[0][0] == "p");  // keeper; the other two are flagged
}

TEST_CASE("symbol table build and tokenize") {
  SymbolTable table = SymbolTable::FromCorpus({"ab"});
  REQUIRE(table.size() == 6);
  CHECK(table.Symbol(0) == "<pad>");
  CHECK(table.Symbol(1) == "<bos>");
  CHECK(table.Symbol(2) == "<eos>");
  CHECK(table.Symbol(3) == "<unk>");
  CHECK(table.Symbol(4) == "a");
  CHECK(table.Symbol(5) == "b");

  TokenSequence seq = Tokenize("ab", table);
  CHECK(seq.ids == std::vector<int>{1, 4, 5, 2});

  CHECK(Tokenize("", table).ids == std::vector<int>{1, 2});

  CHECK_THROWS_AS(Tokenize("c", table, /*allow_unk=*/false), Error);
  CHECK(Tokenize("c", table, /*allow_unk=*/true).ids ==
        std::vector<int>{1, 3, 2});
}

TEST_CASE("devanagari clusters are single symbols") {
  SymbolTable table = SymbolTable::FromCorpus({"नमस्ते"});
  // Every symbol the tokenizer emits must be a full grapheme cluster.
  TokenSequence seq = Tokenize("नमस्ते", table);
  CHECK(Detokenize(seq, table) == "नमस्ते");
  for (int id : seq.ids) {
    if (id <= SymbolTable::kUnk) continue;
    CHECK(GraphemeClusters(table.Symbol(id)).size() == 1);
  }
}

TEST_CASE("tokenize-detokenize reproduces the normalized string") {
  Rng rng(23);
  std::vector<std::string> corpus = {"ka ma ta", "नमस्ते दुनिया",
                                     "abc def", "ని పు వో"};
  SymbolTable table = SymbolTable::FromCorpus(corpus);
  for (const auto& text : corpus)
    CHECK(Detokenize(Tokenize(text, table), table) ==
          NormalizeTranscript(text));
  // Random mixtures of corpus symbols round-trip too.
  for (int trial = 0; trial < 50; ++trial) {
    std::string s;
    for (int i = 0; i < 6; ++i)
      s += table.Symbol(4 + static_cast<int>(rng.Below(table.size() - 4)));
    CHECK(Detokenize(Tokenize(s, table), table) == NormalizeTranscript(s));
  }
}

TEST_CASE("symbol table JSON round trip") {
  testutil::TempDir tmp("symtab");
  SymbolTable table = SymbolTable::FromCorpus({"abc", "नमस्ते"});
  auto path = tmp.path() / "symbols.json";
  table.Save(path);
  CHECK(SymbolTable::Load(path) == table);
}
