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

#ifndef VANI_TEXT_H_
#define VANI_TEXT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vani/manifest.h"

namespace vani {

// Canonical transcript form: NFC, control whitespace folded to spaces,
// runs collapsed, trimmed, and '|' replaced by the danda U+0964 (the
// sentence-separator correction for Devanagari transcripts). Idempotent.
std::string NormalizeTranscript(std::string_view s);

// Levenshtein distance over unicode scalar values, unit costs.
int64_t EditDistance(std::string_view ref, std::string_view hyp);

// Character error rate: edit distance between normalized strings divided by
// the normalized reference length. May exceed 1. Throws on empty reference.
double Cer(std::string_view ref, std::string_view hyp);

// Groups of clip_ids sharing a normalized transcript_gt (size >= 2 only).
// Within each group ids are sorted; all but the first are duplicates.
std::vector<std::vector<std::string>> FindDuplicates(const DatasetManifest& m);

// Extended grapheme clusters of s (UTF-8 substrings).
std::vector<std::string> GraphemeClusters(std::string_view s);

// Shared symbol inventory across languages. Ids 0..3 are reserved.
class SymbolTable {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  SymbolTable();

  // Sorted union of grapheme clusters over all normalized transcripts.
  static SymbolTable Build(const std::vector<const DatasetManifest*>& manifests);
  static SymbolTable FromCorpus(const std::vector<std::string>& texts);

  // Returns -1 when absent.
  int Id(const std::string& symbol) const;
  const std::string& Symbol(int id) const;
  int size() const { return static_cast<int>(symbols_.size()); }

  void Save(const std::filesystem::path& path) const;
  static SymbolTable Load(const std::filesystem::path& path);

  bool operator==(const SymbolTable& o) const { return symbols_ == o.symbols_; }

 private:
  void Reindex();
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

struct TokenSequence {
  std::vector<int> ids;  // BOS ... EOS
  int length() const { return static_cast<int>(ids.size()); }
  bool operator==(const TokenSequence&) const = default;
};

// Normalizes, segments into grapheme clusters and maps to ids, wrapped in
// BOS/EOS. Unknown clusters map to UNK when allow_unk, else throw.
TokenSequence Tokenize(std::string_view s, const SymbolTable& table,
                       bool allow_unk = false);

// Inverse of Tokenize on the normalized string (reserved ids skipped).
std::string Detokenize(const TokenSequence& tokens, const SymbolTable& table);

}  // namespace vani

#endif  // VANI_TEXT_H_
