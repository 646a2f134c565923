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

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "salt/error.h"
#include "salt/pipeline.h"

namespace salt {
namespace {

// Share of corrupted unseen plain facts that are personal rewordings rather
// than systematic confusions.
constexpr double kPreferenceShare = 0.3;

// How the AI-side (old) phrasing of a fact differs from the edited one.
enum class Style {
  kPlain,       // no systematic difference
  kSubstitute,  // one word is replaced
  kFiller,      // old phrasing carries an extra filler word
};

struct Template {
  std::vector<std::string> new_phrase;
  std::vector<std::string> old_phrase;
  std::vector<std::string> cues;  // words that signal the fact in the input
  Style style = Style::kPlain;
  std::size_t confusable = 0;  // index into the phrase that confusions hit
  std::size_t partner = 0;     // template whose word a confusion borrows
};

class WordFactory {
 public:
  explicit WordFactory(std::mt19937_64& rng) {
    const std::string consonants = "bdfgklmnprstvz";
    const std::string vowels = "aeiou";
    std::vector<std::string> syllables;
    for (char c : consonants) {
      for (char v : vowels) syllables.push_back({c, v});
    }
    for (const auto& a : syllables) {
      for (const auto& b : syllables) words_.push_back(a + b);
    }
    std::shuffle(words_.begin(), words_.end(), rng);
  }

  std::string Next() {
    if (next_ >= words_.size()) throw InvalidArgument("synthetic vocabulary exhausted");
    return words_[next_++];
  }

 private:
  std::vector<std::string> words_;
  std::size_t next_ = 0;
};

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Phrases separated and terminated by ".".
struct Rendered {
  std::vector<std::string> words;
  std::vector<std::size_t> error_positions;
  bool substitution_only = true;
};

}  // namespace

SyntheticCorpus GenSynthetic(const SyntheticOptions& options) {
  if (options.vocab_size < 30) throw InvalidArgument("vocab_size must be >= 30");
  if (!(options.error_rate >= 0.0 && options.error_rate <= 1.0)) {
    throw InvalidArgument("error_rate must lie in [0, 1]");
  }
  std::mt19937_64 rng(options.seed);
  WordFactory factory(rng);

  const std::size_t num_templates = std::max<std::size_t>(6, options.vocab_size / 5);
  std::vector<std::string> fillers;
  for (int i = 0; i < 3; ++i) fillers.push_back(factory.Next());

  SyntheticCorpus corpus;
  corpus.error_words = fillers;
  std::vector<Template> templates;
  for (std::size_t k = 0; k < num_templates; ++k) {
    Template t;
    const std::string head = factory.Next();
    const std::string tail = factory.Next();
    t.cues = {head, tail};
    t.style = static_cast<Style>(k % 3);
    switch (t.style) {
      case Style::kPlain:
        t.new_phrase = {head, tail};
        t.old_phrase = t.new_phrase;
        t.confusable = 1;
        break;
      case Style::kSubstitute: {
        const std::string fresh = factory.Next();
        const std::string stale = factory.Next();
        t.new_phrase = {head, fresh, tail};
        t.old_phrase = {head, stale, tail};
        t.confusable = 2;
        corpus.error_words.push_back(stale);
        break;
      }
      case Style::kFiller:
        t.new_phrase = {head, tail};
        t.old_phrase = {head, fillers[k % fillers.size()], tail};
        t.confusable = 1;
        break;
    }
    const std::string id = "C" + std::to_string(1000 + k).substr(1);
    corpus.lexicon.Add(t.new_phrase, id);
    if (t.old_phrase != t.new_phrase) corpus.lexicon.Add(t.old_phrase, id + "o");
    templates.push_back(std::move(t));
  }
  // Confusions are systematic: each template always borrows from one partner.
  for (std::size_t k = 0; k < templates.size(); ++k) {
    std::size_t other = std::uniform_int_distribution<std::size_t>(0, templates.size() - 2)(rng);
    if (other >= k) ++other;
    templates[k].partner = other;
  }
  std::vector<std::string> chatter;
  const std::size_t chatter_size =
      options.vocab_size > 4 * num_templates ? options.vocab_size - 4 * num_templates : 10;
  for (std::size_t i = 0; i < chatter_size; ++i) chatter.push_back(factory.Next());
  // Personal-preference rewordings: unpredictable per record.
  std::vector<std::string> preferences;
  for (std::size_t i = 0; i < num_templates; ++i) preferences.push_back(factory.Next());
  const std::vector<std::string> glue = {"the", "and", "with", "of"};

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  auto make_record = [&](std::size_t index, Origin origin) {
    const std::size_t facts = 3;
    std::vector<std::size_t> chosen;
    while (chosen.size() < facts) {
      const std::size_t k = pick(templates.size());
      if (std::find(chosen.begin(), chosen.end(), k) == chosen.end()) chosen.push_back(k);
    }
    std::vector<std::string> input;
    for (std::size_t k : chosen) {
      for (const auto& c : templates[k].cues) input.push_back(c);
      input.push_back(chatter[pick(chatter.size())]);
      input.push_back(glue[pick(glue.size())]);
    }
    std::shuffle(input.begin(), input.end(), rng);

    // Seen data is written in the old style; edits of unseen data use the
    // new one.
    const bool unseen = origin == Origin::kUnseen;
    Rendered edit;
    Rendered ai;
    for (std::size_t k : chosen) {
      const Template& t = templates[k];
      const auto& reference = unseen ? t.new_phrase : t.old_phrase;
      edit.words.insert(edit.words.end(), reference.begin(), reference.end());
      edit.words.push_back(".");

      std::vector<std::string> phrase = reference;
      const bool corrupt = coin(rng) < options.error_rate;
      const std::size_t offset = ai.words.size();
      if (corrupt && unseen && t.style != Style::kPlain) {
        phrase = t.old_phrase;
        if (t.style == Style::kSubstitute) {
          ai.error_positions.push_back(offset + 1);
        } else {
          ai.error_positions.push_back(offset + 1);
          ai.substitution_only = false;
        }
      } else if (corrupt && unseen && coin(rng) < kPreferenceShare) {
        // The AI phrase is the habitual one; the user rewords it.
        auto& edited = edit.words;
        edited[edited.size() - 1 - reference.size() + t.confusable] =
            preferences[pick(preferences.size())];
        ai.error_positions.push_back(offset + t.confusable);
      } else if (corrupt) {
        const Template& donor = templates[t.partner];
        phrase[t.confusable] = donor.new_phrase[donor.confusable];
        ai.error_positions.push_back(offset + t.confusable);
      }
      ai.words.insert(ai.words.end(), phrase.begin(), phrase.end());
      ai.words.push_back(".");
    }

    SyntheticRecord rec;
    const std::string prefix = unseen ? "u" : "s";
    rec.record.id = prefix + std::to_string(100000 + index).substr(1);
    rec.record.input = Join(input);
    rec.record.ai_summary = Join(ai.words);
    rec.record.edit_summary = Join(edit.words);
    rec.record.origin = origin;
    rec.error_positions = std::move(ai.error_positions);
    rec.substitution_only = ai.substitution_only;
    return rec;
  };

  for (std::size_t i = 0; i < options.size; ++i) {
    corpus.unseen.push_back(make_record(i, Origin::kUnseen));
  }
  for (std::size_t i = 0; i < options.seen_size; ++i) {
    corpus.seen.push_back(make_record(i, Origin::kSeen));
  }

  std::unordered_set<std::string> seen_words;
  auto note = [&](const std::string& text) {
    for (auto& w : SplitWords(text)) {
      if (seen_words.insert(w).second) corpus.vocabulary.push_back(w);
    }
  };
  for (const auto* part : {&corpus.unseen, &corpus.seen}) {
    for (const auto& r : *part) {
      note(r.record.input);
      note(r.record.ai_summary);
      note(r.record.edit_summary);
    }
  }
  return corpus;
}

void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto records = [](const std::vector<SyntheticRecord>& recs) {
    std::vector<DatasetRecord> out;
    for (const auto& r : recs) out.push_back(r.record);
    return out;
  };
  WriteDatasetRecords(records(corpus.unseen), dir / "unseen.jsonl");
  WriteDatasetRecords(records(corpus.seen), dir / "seen.jsonl");
  SaveConceptLexicon(corpus.lexicon, dir / "lexicon.tsv");
  {
    std::ofstream out(dir / "vocab.txt");
    for (const auto& w : corpus.vocabulary) out << w << '\n';
  }
  std::ofstream truth(dir / "truth.jsonl");
  for (const auto* part : {&corpus.unseen, &corpus.seen}) {
    for (const auto& r : *part) {
      nlohmann::ordered_json j;
      j["id"] = r.record.id;
      j["error_positions"] = r.error_positions;
      j["substitution_only"] = r.substitution_only;
      truth << j.dump() << '\n';
    }
  }
  if (!truth) throw DataError("cannot write synthetic corpus to " + dir.string());
}

}  // namespace salt
