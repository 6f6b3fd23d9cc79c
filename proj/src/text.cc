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

#include "vani/text.h"

#include <unicode/ubrk.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "vani/util/error.h"
#include "vani/util/io.h"
#include "vani/util/utf8.h"

namespace vani {

namespace {

constexpr uint32_t kDanda = 0x0964;

std::u16string ToUtf16(std::string_view s) {
  std::u16string out(s.size() + 1, u'\0');
  UErrorCode err = U_ZERO_ERROR;
  int32_t len16 = 0;
  u_strFromUTF8(reinterpret_cast<UChar*>(out.data()),
                static_cast<int32_t>(out.size()), &len16, s.data(),
                static_cast<int32_t>(s.size()), &err);
  if (U_FAILURE(err) && err != U_INVALID_CHAR_FOUND &&
      err != U_ILLEGAL_CHAR_FOUND)
    throw Error("utf-16 conversion failed");
  out.resize(len16);
  return out;
}

std::string ToUtf8(const char16_t* s, int32_t len16) {
  std::string out(static_cast<size_t>(len16) * 3 + 1, '\0');
  UErrorCode err = U_ZERO_ERROR;
  int32_t len8 = 0;
  u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &len8,
              reinterpret_cast<const UChar*>(s), len16, &err);
  if (U_FAILURE(err)) throw Error("utf-8 conversion failed");
  out.resize(len8);
  return out;
}

std::string NfcNormalize(std::string_view s) {
  UErrorCode err = U_ZERO_ERROR;
  const UNormalizer2* nfc = unorm2_getNFCInstance(&err);
  if (U_FAILURE(err)) throw Error("NFC normalizer unavailable");
  std::u16string in = ToUtf16(s);
  std::u16string out(in.size() * 2 + 16, u'\0');
  int32_t len = unorm2_normalize(nfc, reinterpret_cast<const UChar*>(in.data()),
                                 static_cast<int32_t>(in.size()),
                                 reinterpret_cast<UChar*>(out.data()),
                                 static_cast<int32_t>(out.size()), &err);
  if (U_FAILURE(err)) throw Error("NFC normalization failed");
  return ToUtf8(out.data(), len);
}

}  // namespace

std::string NormalizeTranscript(std::string_view s) {
  // Whitespace folding happens before NFC so the final composition pass
  // sees the string it will be stored as; a second application is a no-op.
  std::vector<uint32_t> cps = DecodeUtf8(s);
  std::vector<uint32_t> folded;
  folded.reserve(cps.size());
  bool pending_space = false;
  for (uint32_t cp : cps) {
    if (cp == '\n' || cp == '\r' || cp == '\t' || cp == ' ') {
      if (!folded.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      folded.push_back(' ');
      pending_space = false;
    }
    folded.push_back(cp == '|' ? kDanda : cp);
  }
  return NfcNormalize(EncodeUtf8(folded));
}

int64_t EditDistance(std::string_view ref, std::string_view hyp) {
  std::vector<uint32_t> a = DecodeUtf8(ref);
  std::vector<uint32_t> b = DecodeUtf8(hyp);
  size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int64_t>(m);
  if (m == 0) return static_cast<int64_t>(n);
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double Cer(std::string_view ref, std::string_view hyp) {
  std::string nref = NormalizeTranscript(ref);
  std::string nhyp = NormalizeTranscript(hyp);
  size_t ref_len = CodepointCount(nref);
  if (ref_len == 0) throw Error("CER reference is empty after normalization");
  return static_cast<double>(EditDistance(nref, nhyp)) /
         static_cast<double>(ref_len);
}

std::vector<std::vector<std::string>> FindDuplicates(const DatasetManifest& m) {
  std::map<std::string, std::vector<std::string>> by_text;
  for (const auto& r : m.records)
    by_text[NormalizeTranscript(r.transcript_gt)].push_back(r.clip_id);
  std::vector<std::vector<std::string>> groups;
  for (auto& [text, ids] : by_text) {
    if (ids.size() < 2) continue;
    std::sort(ids.begin(), ids.end());
    groups.push_back(std::move(ids));
  }
  return groups;
}

std::vector<std::string> GraphemeClusters(std::string_view s) {
  if (s.empty()) return {};
  std::u16string u16 = ToUtf16(s);
  UErrorCode err = U_ZERO_ERROR;
  UBreakIterator* bi =
      ubrk_open(UBRK_CHARACTER, "", reinterpret_cast<const UChar*>(u16.data()),
                static_cast<int32_t>(u16.size()), &err);
  if (U_FAILURE(err)) throw Error("grapheme break iterator unavailable");
  std::vector<std::string> clusters;
  int32_t start = ubrk_first(bi);
  for (int32_t end = ubrk_next(bi); end != UBRK_DONE; end = ubrk_next(bi)) {
    clusters.push_back(ToUtf8(u16.data() + start, end - start));
    start = end;
  }
  ubrk_close(bi);
  return clusters;
}

SymbolTable::SymbolTable() {
  symbols_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
  Reindex();
}

void SymbolTable::Reindex() {
  index_.clear();
  for (size_t i = 0; i < symbols_.size(); ++i)
    index_[symbols_[i]] = static_cast<int>(i);
}

SymbolTable SymbolTable::FromCorpus(const std::vector<std::string>& texts) {
  std::set<std::string> clusters;
  for (const auto& t : texts)
    for (auto& c : GraphemeClusters(NormalizeTranscript(t)))
      clusters.insert(std::move(c));
  SymbolTable table;
  for (const auto& c : clusters) table.symbols_.push_back(c);
  table.Reindex();
  return table;
}

SymbolTable SymbolTable::Build(
    const std::vector<const DatasetManifest*>& manifests) {
  std::vector<std::string> texts;
  for (const auto* m : manifests)
    for (const auto& r : m->records) texts.push_back(r.transcript_gt);
  return FromCorpus(texts);
}

int SymbolTable::Id(const std::string& symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

const std::string& SymbolTable::Symbol(int id) const {
  if (id < 0 || id >= size()) throw Error("symbol id out of range");
  return symbols_[id];
}

void SymbolTable::Save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j = symbols_;
  AtomicWriteFile(path, j.dump() + "\n");
}

SymbolTable SymbolTable::Load(const std::filesystem::path& path) {
  auto j = nlohmann::ordered_json::parse(ReadTextFile(path));
  if (!j.is_array() || j.size() < 4)
    throw Error("symbol table must be a JSON array with reserved entries");
  SymbolTable table;
  table.symbols_ = j.get<std::vector<std::string>>();
  table.Reindex();
  if (table.symbols_[kPad] != "<pad>" || table.symbols_[kBos] != "<bos>" ||
      table.symbols_[kEos] != "<eos>" || table.symbols_[kUnk] != "<unk>")
    throw Error("symbol table reserved ids are corrupted");
  return table;
}

TokenSequence Tokenize(std::string_view s, const SymbolTable& table,
                       bool allow_unk) {
  TokenSequence out;
  out.ids.push_back(SymbolTable::kBos);
  std::vector<std::string> clusters = GraphemeClusters(NormalizeTranscript(s));
  for (size_t i = 0; i < clusters.size(); ++i) {
    int id = table.Id(clusters[i]);
    if (id < 0) {
      if (!allow_unk)
        throw Error("unknown symbol '" + clusters[i] + "' at position " +
                    std::to_string(i));
      id = SymbolTable::kUnk;
    }
    out.ids.push_back(id);
  }
  out.ids.push_back(SymbolTable::kEos);
  return out;
}

std::string Detokenize(const TokenSequence& tokens, const SymbolTable& table) {
  std::string out;
  for (int id : tokens.ids) {
    if (id <= SymbolTable::kUnk) continue;
    out += table.Symbol(id);
  }
  return out;
}

}  // namespace vani
