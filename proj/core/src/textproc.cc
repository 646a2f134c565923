// Copyright 2026 The SALT Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "salt/textproc.h"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "salt/error.h"

namespace salt {
namespace {

bool IsAsciiPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
bool IsAsciiSpace(unsigned char c) { return c < 0x80 && std::isspace(c); }
bool IsWordChar(unsigned char c) {
  return c >= 0x80 || std::isalnum(c);
}

std::string JoinPhrase(std::span<const std::string> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string TrimLine(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                           line.back() == ' ' || line.back() == '\t')) {
    line.pop_back();
  }
  std::size_t start = 0;
  while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) {
    ++start;
  }
  return line.substr(start);
}

}  // namespace

std::vector<TokenId> TokenSeq::ids() const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.id);
  return out;
}

std::vector<std::string> TokenSeq::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::string TokenSeq::text() const { return JoinPhrase(surfaces()); }

Vocab::Vocab() {
  for (std::string_view s : {"<pad>", "<bos>", "<eos>", "<unk>"}) Add(s);
}

TokenId Vocab::Lookup(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocab::Contains(std::string_view surface) const {
  return index_.contains(std::string(surface));
}

TokenId Vocab::Add(std::string_view surface) {
  auto it = index_.find(std::string(surface));
  if (it != index_.end()) return it->second;
  if (frozen_) {
    throw InvalidArgument("cannot add '" + std::string(surface) +
                          "' to a frozen vocabulary");
  }
  const auto id = static_cast<TokenId>(surfaces_.size());
  surfaces_.emplace_back(surface);
  index_.emplace(std::string(surface), id);
  return id;
}

const std::string& Vocab::Surface(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size()) {
    throw InvalidArgument("token id " + std::to_string(id) +
                          " out of range for vocabulary of size " +
                          std::to_string(surfaces_.size()));
  }
  return surfaces_[id];
}

std::uint64_t Vocab::Hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& s : surfaces_) {
    for (unsigned char c : s) mix(c);
    mix(0);
  }
  return h;
}

Vocab Vocab::FromSurfaces(std::span<const std::string> surfaces) {
  Vocab v;
  if (surfaces.size() < static_cast<std::size_t>(kNumReserved)) {
    throw DataError("vocabulary is missing reserved entries");
  }
  for (TokenId i = 0; i < kNumReserved; ++i) {
    if (surfaces[i] != v.surfaces_[i]) {
      throw DataError("vocabulary reserved entry " + std::to_string(i) +
                      " is '" + surfaces[i] + "'");
    }
  }
  for (std::size_t i = kNumReserved; i < surfaces.size(); ++i) {
    if (v.Contains(surfaces[i])) {
      throw DataError("duplicate vocabulary entry '" + surfaces[i] + "'");
    }
    v.Add(surfaces[i]);
  }
  return v;
}

void ConceptLexicon::Add(std::vector<std::string> phrase,
                         std::string concept_id) {
  if (phrase.empty()) throw InvalidArgument("empty concept phrase");
  for (const auto& e : entries_) {
    if (e.phrase == phrase) {
      if (e.concept_id == concept_id) return;
      throw DataError("phrase '" + JoinPhrase(phrase) +
                      "' maps to two concepts: " + e.concept_id + ", " +
                      concept_id);
    }
  }
  max_len_ = std::max(max_len_, phrase.size());
  entries_.push_back({std::move(phrase), std::move(concept_id)});
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsAsciiSpace(c)) {
      flush();
    } else if (IsAsciiPunct(c)) {
      const bool inner_apostrophe =
          c == '\'' && !word.empty() && i + 1 < text.size() &&
          IsWordChar(static_cast<unsigned char>(word.back())) &&
          std::isalpha(static_cast<unsigned char>(text[i + 1]));
      if (inner_apostrophe) {
        word += '\'';
      } else {
        flush();
        out.emplace_back(1, static_cast<char>(c));
      }
    } else {
      word += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  flush();
  return out;
}

TokenSeq Tokenize(std::string_view text, Vocab& vocab, bool grow,
                  SourceRole role) {
  if (!grow) return Tokenize(text, static_cast<const Vocab&>(vocab), role);
  TokenSeq seq;
  seq.role = role;
  for (auto& w : SplitWords(text)) {
    const TokenId id = vocab.Add(w);
    seq.tokens.push_back({std::move(w), id});
  }
  return seq;
}

TokenSeq Tokenize(std::string_view text, const Vocab& vocab,
                  SourceRole role) {
  TokenSeq seq;
  seq.role = role;
  for (auto& w : SplitWords(text)) {
    const TokenId id = vocab.Lookup(w);
    seq.tokens.push_back({std::move(w), id});
  }
  return seq;
}

TokenSeq FromIds(std::span<const TokenId> ids, const Vocab& vocab,
                 SourceRole role) {
  TokenSeq seq;
  seq.role = role;
  for (TokenId id : ids) seq.tokens.push_back({vocab.Surface(id), id});
  return seq;
}

bool IsPunctuation(std::string_view surface) {
  return !surface.empty() &&
         std::all_of(surface.begin(), surface.end(), [](char c) {
           return IsAsciiPunct(static_cast<unsigned char>(c));
         });
}

TokenSeq StripStopPunct(const TokenSeq& seq, const StopwordSet& stopwords) {
  TokenSeq out;
  out.role = seq.role;
  for (const auto& t : seq.tokens) {
    if (IsPunctuation(t.surface) || stopwords.contains(t.surface)) continue;
    out.tokens.push_back(t);
  }
  return out;
}

std::unordered_set<std::string> ExtractConcepts(const TokenSeq& seq,
                                                const ConceptLexicon& lex) {
  std::unordered_map<std::string, const std::string*> by_phrase;
  for (const auto& e : lex.entries()) {
    by_phrase.emplace(JoinPhrase(e.phrase), &e.concept_id);
  }
  const auto words = seq.surfaces();
  std::unordered_set<std::string> found;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    const std::size_t longest =
        std::min(lex.max_phrase_length(), words.size() - i);
    for (std::size_t len = longest; len >= 1; --len) {
      auto it = by_phrase.find(
          JoinPhrase(std::span<const std::string>(words).subspan(i, len)));
      if (it != by_phrase.end()) {
        found.insert(*it->second);
        matched = len;
        break;
      }
    }
    i += matched == 0 ? 1 : matched;
  }
  return found;
}

const StopwordSet& DefaultStopwords() {
  static const StopwordSet kWords = {
      "a",     "an",    "the",  "and",   "or",   "but",  "if",    "of",
      "at",    "by",    "for",  "with",  "to",   "from", "in",    "on",
      "off",   "out",   "over", "under", "is",   "are",  "was",   "were",
      "be",    "been",  "being", "has",  "have", "had",  "do",    "does",
      "did",   "it",    "its",  "this",  "that", "these", "those", "he",
      "she",   "they",  "them", "his",   "her",  "their", "as",   "so",
      "than",  "then",  "also", "very",  "which", "who",  "will",  "would",
  };
  return kWords;
}

StopwordSet LoadStopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file " + path.string());
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    line = TrimLine(std::move(line));
    if (line.empty()) continue;
    for (auto& w : SplitWords(line)) out.insert(std::move(w));
  }
  return out;
}

ConceptLexicon LoadConceptLexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open concept lexicon " + path.string());
  ConceptLexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = TrimLine(std::move(line));
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected phrase<TAB>concept_id");
    }
    auto phrase = SplitWords(line.substr(0, tab));
    std::string id = TrimLine(line.substr(tab + 1));
    if (phrase.empty() || id.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": empty phrase or concept id");
    }
    lex.Add(std::move(phrase), std::move(id));
  }
  return lex;
}

void SaveConceptLexicon(const ConceptLexicon& lex,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& e : lex.entries()) {
    out << JoinPhrase(e.phrase) << '\t' << e.concept_id << '\n';
  }
}

}  // namespace salt
