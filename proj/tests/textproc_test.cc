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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "salt/error.h"
#include "salt/textproc.h"

namespace salt {
namespace {

std::vector<std::string> Surfaces(const TokenSeq& s) { return s.surfaces(); }

TEST(SplitWords, PunctuationBecomesItsOwnToken) {
  EXPECT_EQ(SplitWords("Fish oil."),
            (std::vector<std::string>{"fish", "oil", "."}));
  EXPECT_EQ(SplitWords("  Denies chest-pain,  today"),
            (std::vector<std::string>{"denies", "chest", "-", "pain", ",", "today"}));
}

TEST(SplitWords, InnerApostropheStaysInWord) {
  EXPECT_EQ(SplitWords("He doesn't 'want'"),
            (std::vector<std::string>{"he", "doesn't", "'", "want", "'"}));
}

TEST(Vocab, ReservedIdsComeFirst) {
  Vocab v;
  EXPECT_EQ(v.size(), static_cast<std::size_t>(kNumReserved));
  EXPECT_EQ(v.Lookup("never-seen"), kUnkId);
  EXPECT_EQ(v.Surface(kEosId), v.surfaces()[kEosId]);
}

TEST(Vocab, IdsAssignedInFirstSeenOrder) {
  Vocab v;
  const TokenSeq s = Tokenize("b a b c", v, /*grow=*/true);
  EXPECT_EQ(s.ids(), (std::vector<TokenId>{kNumReserved, kNumReserved + 1,
                                           kNumReserved, kNumReserved + 2}));
  EXPECT_EQ(v.Add("a"), kNumReserved + 1);
}

TEST(Vocab, FrozenVocabRejectsNewSurfaces) {
  Vocab v;
  v.Add("x");
  v.Freeze();
  EXPECT_THROW(v.Add("y"), Error);
  EXPECT_EQ(v.Add("x"), kNumReserved);
}

TEST(Vocab, HashDependsOnOrder) {
  Vocab ab;
  ab.Add("a");
  ab.Add("b");
  Vocab ba;
  ba.Add("b");
  ba.Add("a");
  EXPECT_NE(ab.Hash(), ba.Hash());
  EXPECT_EQ(Vocab::FromSurfaces(ab.surfaces()).Hash(), ab.Hash());
  const std::vector<std::string> bare = {"a", "b"};
  EXPECT_THROW(Vocab::FromSurfaces(bare), Error);
}

TEST(Tokenize, UnknownKeepsSurfaceWithoutGrowing) {
  Vocab v;
  Tokenize("known", v, true);
  const std::size_t before = v.size();
  const TokenSeq s = Tokenize("known novel", v, /*grow=*/false);
  EXPECT_EQ(v.size(), before);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].id, kUnkId);
  EXPECT_EQ(s[1].surface, "novel");
}

TEST(Tokenize, RoundTripThroughIds) {
  Vocab v;
  const TokenSeq s = Tokenize("the patient takes aspirin .", v, true);
  const auto ids = s.ids();
  const TokenSeq back = FromIds(ids, v);
  EXPECT_EQ(back.surfaces(), s.surfaces());
  EXPECT_EQ(back.text(), "the patient takes aspirin .");
}

TEST(StripStopPunct, RemovesPunctuationOnly) {
  Vocab v;
  const TokenSeq s = Tokenize("denies chest pain .", v, true);
  EXPECT_EQ(Surfaces(StripStopPunct(s, {})),
            (std::vector<std::string>{"denies", "chest", "pain"}));
}

TEST(StripStopPunct, RemovesStopwords) {
  Vocab v;
  const TokenSeq s = Tokenize("the patient", v, true);
  EXPECT_EQ(Surfaces(StripStopPunct(s, {"the"})),
            (std::vector<std::string>{"patient"}));
}

TEST(StripStopPunct, Idempotent) {
  Vocab v;
  const TokenSeq s = Tokenize("the patient , and the dose ; daily .", v, true);
  const auto& stop = DefaultStopwords();
  const TokenSeq once = StripStopPunct(s, stop);
  EXPECT_EQ(Surfaces(StripStopPunct(once, stop)), Surfaces(once));
}

TEST(ExtractConcepts, LongestMatchConsumesTokens) {
  ConceptLexicon lex;
  lex.Add({"fish", "oil"}, "C2");
  lex.Add({"oil"}, "C3");
  Vocab v;
  const TokenSeq s = Tokenize("fish oil capsules", v, true);
  EXPECT_EQ(ExtractConcepts(s, lex), (std::unordered_set<std::string>{"C2"}));
}

TEST(ExtractConcepts, ShorterMatchWhenLongerAbsent) {
  ConceptLexicon lex;
  lex.Add({"fish", "oil"}, "C2");
  lex.Add({"oil"}, "C3");
  Vocab v;
  const TokenSeq s = Tokenize("olive oil and fish", v, true);
  EXPECT_EQ(ExtractConcepts(s, lex), (std::unordered_set<std::string>{"C3"}));
}

TEST(ExtractConcepts, EmptyLexiconFindsNothing) {
  Vocab v;
  EXPECT_TRUE(ExtractConcepts(Tokenize("fish oil", v, true), {}).empty());
}

TEST(LexiconFile, SaveLoadRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "salt_lexicon_test.tsv";
  ConceptLexicon lex;
  lex.Add({"fish", "oil"}, "C2");
  lex.Add({"aspirin"}, "C7");
  SaveConceptLexicon(lex, path);
  const ConceptLexicon back = LoadConceptLexicon(path);
  ASSERT_EQ(back.entries().size(), 2u);
  EXPECT_EQ(back.entries()[0].phrase, (std::vector<std::string>{"fish", "oil"}));
  EXPECT_EQ(back.entries()[1].concept_id, "C7");
  EXPECT_EQ(back.max_phrase_length(), 2u);
  std::filesystem::remove(path);
}

TEST(LexiconFile, MissingTabIsDataError) {
  const auto path = std::filesystem::temp_directory_path() / "salt_bad_lexicon.tsv";
  std::ofstream(path) << "fish oil C2\n";
  try {
    LoadConceptLexicon(path);
    FAIL() << "expected a data error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
  std::filesystem::remove(path);
}

TEST(StopwordFile, OneSurfacePerLine) {
  const auto path = std::filesystem::temp_directory_path() / "salt_stop.txt";
  std::ofstream(path) << "the\nof\n\n";
  const StopwordSet s = LoadStopwords(path);
  EXPECT_EQ(s, (StopwordSet{"the", "of"}));
  std::filesystem::remove(path);
}

TEST(DefaultStopwords, ContainsCommonWords) {
  const auto& s = DefaultStopwords();
  EXPECT_TRUE(s.contains("the"));
  EXPECT_TRUE(s.contains("and"));
  EXPECT_FALSE(s.contains("aspirin"));
}

}  // namespace
}  // namespace salt
