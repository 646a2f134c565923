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

#include "salt/metrics.h"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "salt/error.h"

namespace salt {
namespace {

RougeScore FromCounts(double overlap, double candidate_total,
                      double reference_total) {
  RougeScore s;
  s.precision = candidate_total > 0 ? overlap / candidate_total : 0.0;
  s.recall = reference_total > 0 ? overlap / reference_total : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

std::map<std::vector<std::string>, std::size_t> NgramCounts(
    const std::vector<std::string>& words, int n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= words.size(); ++i) {
    ++counts[std::vector<std::string>(words.begin() + i,
                                      words.begin() + i + len)];
  }
  return counts;
}

template <typename Set>
SageCounts CountGroups(const Set& ai, const Set& edit,
                       const std::vector<std::string>& new_items) {
  SageCounts c;
  for (const auto& w : new_items) {
    const bool in_ai = ai.contains(w);
    const bool in_edit = edit.contains(w);
    if (in_ai && !in_edit) ++c.g1;
    if (!in_ai && in_edit) ++c.g2;
    if (in_ai && in_edit) ++c.g3;
  }
  return c;
}

}  // namespace

RougeScore RougeN(const TokenSeq& candidate, const TokenSeq& reference,
                  int n) {
  if (n < 1) throw InvalidArgument("ROUGE-N needs n >= 1");
  const auto cand = NgramCounts(candidate.surfaces(), n);
  const auto ref = NgramCounts(reference.surfaces(), n);
  std::size_t overlap = 0;
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  for (const auto& [gram, count] : cand) {
    cand_total += count;
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  for (const auto& [gram, count] : ref) ref_total += count;
  return FromCounts(static_cast<double>(overlap), static_cast<double>(cand_total),
                    static_cast<double>(ref_total));
}

std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

RougeScore RougeL(const TokenSeq& candidate, const TokenSeq& reference) {
  const auto cand = candidate.surfaces();
  const auto ref = reference.surfaces();
  const auto lcs = LcsLength(cand, ref);
  return FromCounts(static_cast<double>(lcs), static_cast<double>(cand.size()),
                    static_cast<double>(ref.size()));
}

SageCounts SageWord(const TokenSeq& s_new, const TokenSeq& s_ai,
                    const TokenSeq& s_edit, const StopwordSet& stopwords,
                    SageCountMode mode) {
  auto words = [&](const TokenSeq& s) {
    return StripStopPunct(s, stopwords).surfaces();
  };
  const auto ai_words = words(s_ai);
  const auto edit_words = words(s_edit);
  const std::unordered_set<std::string> ai(ai_words.begin(), ai_words.end());
  const std::unordered_set<std::string> edit(edit_words.begin(),
                                             edit_words.end());
  auto new_words = words(s_new);
  if (mode == SageCountMode::kTypes) {
    std::set<std::string> distinct(new_words.begin(), new_words.end());
    new_words.assign(distinct.begin(), distinct.end());
  }
  return CountGroups(ai, edit, new_words);
}

SageCounts SageConcept(const TokenSeq& s_new, const TokenSeq& s_ai,
                       const TokenSeq& s_edit, const ConceptLexicon& lex) {
  if (lex.empty()) return {};
  const auto ai = ExtractConcepts(s_ai, lex);
  const auto edit = ExtractConcepts(s_edit, lex);
  const auto found = ExtractConcepts(s_new, lex);
  std::vector<std::string> concepts(found.begin(), found.end());
  std::sort(concepts.begin(), concepts.end());
  return CountGroups(ai, edit, concepts);
}

SageCorpus AggregateSage(std::span<const SageReport> reports,
                         SageAggregation mode) {
  SageCorpus out;
  out.examples = reports.size();
  for (const auto& r : reports) {
    out.word[0] += static_cast<double>(r.word.g1);
    out.word[1] += static_cast<double>(r.word.g2);
    out.word[2] += static_cast<double>(r.word.g3);
    out.concept_level[0] += static_cast<double>(r.concept_level.g1);
    out.concept_level[1] += static_cast<double>(r.concept_level.g2);
    out.concept_level[2] += static_cast<double>(r.concept_level.g3);
  }
  if (mode == SageAggregation::kMean && !reports.empty()) {
    const double n = static_cast<double>(reports.size());
    for (auto& x : out.word) x /= n;
    for (auto& x : out.concept_level) x /= n;
  }
  return out;
}

SageRatios SageRatioReport(const SageCorpus& system,
                           const SageCorpus& baseline) {
  SageRatios out;
  for (std::size_t k = 0; k < 3; ++k) {
    if (baseline.word[k] > 0) out.word[k] = system.word[k] / baseline.word[k];
    if (baseline.concept_level[k] > 0) {
      out.concept_level[k] = system.concept_level[k] / baseline.concept_level[k];
    }
  }
  return out;
}

}  // namespace salt
