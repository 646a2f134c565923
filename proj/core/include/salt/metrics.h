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

#ifndef SALT_METRICS_H_
#define SALT_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>

#include "salt/textproc.h"

namespace salt {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Clipped n-gram overlap on token surfaces; no stemming or stopword removal.
RougeScore RougeN(const TokenSeq& candidate, const TokenSeq& reference, int n);
// Longest-common-subsequence based score.
RougeScore RougeL(const TokenSeq& candidate, const TokenSeq& reference);
std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b);

// Counts of S_new items falling in G1 (AI only), G2 (edit only) and
// G3 (shared).
struct SageCounts {
  std::size_t g1 = 0;
  std::size_t g2 = 0;
  std::size_t g3 = 0;

  SageCounts& operator+=(const SageCounts& o) {
    g1 += o.g1;
    g2 += o.g2;
    g3 += o.g3;
    return *this;
  }
  friend bool operator==(const SageCounts&, const SageCounts&) = default;
};

struct SageReport {
  SageCounts word;
  SageCounts concept_level;
};

enum class SageCountMode {
  kTypes,   // distinct words of S_new
  kTokens,  // every occurrence in S_new
};

SageCounts SageWord(const TokenSeq& s_new, const TokenSeq& s_ai,
                    const TokenSeq& s_edit, const StopwordSet& stopwords,
                    SageCountMode mode = SageCountMode::kTypes);
SageCounts SageConcept(const TokenSeq& s_new, const TokenSeq& s_ai,
                       const TokenSeq& s_edit, const ConceptLexicon& lex);

enum class SageAggregation {
  kSum,   // corpus totals
  kMean,  // per-example mean counts
};

struct SageCorpus {
  std::array<double, 3> word{};
  std::array<double, 3> concept_level{};
  std::size_t examples = 0;
};

SageCorpus AggregateSage(std::span<const SageReport> reports,
                         SageAggregation mode = SageAggregation::kSum);

// nullopt marks a ratio whose baseline count is zero.
struct SageRatios {
  std::array<std::optional<double>, 3> word;
  std::array<std::optional<double>, 3> concept_level;
};

SageRatios SageRatioReport(const SageCorpus& system,
                           const SageCorpus& baseline);

}  // namespace salt

#endif  // SALT_METRICS_H_
