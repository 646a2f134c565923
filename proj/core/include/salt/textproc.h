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

#ifndef SALT_TEXTPROC_H_
#define SALT_TEXTPROC_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace salt {

using TokenId = std::int32_t;

// Reserved ids occupy 0..3 in every vocabulary.
inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr TokenId kNumReserved = 4;

struct Token {
  std::string surface;
  TokenId id = kUnkId;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class SourceRole {
  kInput,
  kAiSummary,
  kEditSummary,
  kImitationSummary,
  kGenerated,
};

struct TokenSeq {
  std::vector<Token> tokens;
  SourceRole role = SourceRole::kGenerated;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }

  std::vector<TokenId> ids() const;
  std::vector<std::string> surfaces() const;
  // Surfaces joined by single spaces.
  std::string text() const;
};

// Surface <-> id map. Growth is allowed until Freeze(); afterwards the
// vocabulary is read-only and may be shared between threads.
class Vocab {
 public:
  Vocab();

  std::size_t size() const { return surfaces_.size(); }
  bool frozen() const { return frozen_; }
  void Freeze() { frozen_ = true; }

  // Returns kUnkId for unknown surfaces.
  TokenId Lookup(std::string_view surface) const;
  // Adds `surface` if absent. Throws once frozen.
  TokenId Add(std::string_view surface);
  const std::string& Surface(TokenId id) const;
  bool Contains(std::string_view surface) const;

  // FNV-1a over the ordered surface list; identifies the id space in
  // checkpoints.
  std::uint64_t Hash() const;

  const std::vector<std::string>& surfaces() const { return surfaces_; }
  static Vocab FromSurfaces(std::span<const std::string> surfaces);

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> index_;
  bool frozen_ = false;
};

using StopwordSet = std::unordered_set<std::string>;

struct ConceptEntry {
  std::vector<std::string> phrase;  // tokenized surfaces
  std::string concept_id;
};

class ConceptLexicon {
 public:
  void Add(std::vector<std::string> phrase, std::string concept_id);
  const std::vector<ConceptEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t max_phrase_length() const { return max_len_; }

 private:
  std::vector<ConceptEntry> entries_;
  std::size_t max_len_ = 0;
};

// Lowercases, then splits on whitespace and punctuation. Every ASCII
// punctuation character becomes its own token, except an apostrophe with
// letters on both sides, which stays inside the word ("doesn't").
std::vector<std::string> SplitWords(std::string_view text);

// Unknown surfaces map to UNK (keeping their surface) unless `grow`.
TokenSeq Tokenize(std::string_view text, Vocab& vocab, bool grow,
                  SourceRole role = SourceRole::kGenerated);
TokenSeq Tokenize(std::string_view text, const Vocab& vocab,
                  SourceRole role = SourceRole::kGenerated);

TokenSeq FromIds(std::span<const TokenId> ids, const Vocab& vocab,
                 SourceRole role = SourceRole::kGenerated);

bool IsPunctuation(std::string_view surface);

TokenSeq StripStopPunct(const TokenSeq& seq, const StopwordSet& stopwords);

// Greedy longest match, left to right. A matched span consumes its tokens.
std::unordered_set<std::string> ExtractConcepts(const TokenSeq& seq,
                                                const ConceptLexicon& lex);

const StopwordSet& DefaultStopwords();

// One surface per line.
StopwordSet LoadStopwords(const std::filesystem::path& path);
// One `phrase<TAB>concept_id` entry per line.
ConceptLexicon LoadConceptLexicon(const std::filesystem::path& path);
void SaveConceptLexicon(const ConceptLexicon& lex,
                        const std::filesystem::path& path);

}  // namespace salt

#endif  // SALT_TEXTPROC_H_
