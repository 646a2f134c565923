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

#ifndef SALT_TESTS_ORACLES_H_
#define SALT_TESTS_ORACLES_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "salt/pipeline.h"

namespace salt::testing {

// Scores for the brute-force aligner. Deliberately not NwScoring so the
// oracle does not share the library's substitution logic.
struct PlainScores {
  int match = 2;
  int mismatch = -2;
  int gap = -2;
  int near_match = 1;
};

int OracleSubstitution(const std::string& a, const std::string& b,
                       const PlainScores& s);

// Maximum score over every global alignment, by exhaustive recursion.
int BruteForceAlignScore(const std::vector<std::string>& a,
                         const std::vector<std::string>& b,
                         const PlainScores& s);

// Longest common subsequence by enumerating every subsequence of `a`.
std::size_t BruteForceLcs(const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

TokenSeq MakeSeq(const std::vector<std::string>& words);
std::vector<std::string> RandomWords(std::mt19937_64& rng, std::size_t max_len,
                                     std::size_t alphabet, bool allow_empty);

// Objective value computed with a hand-written softmax.
double OracleObjectiveValue(const TinyLmParams& params, const Objective& obj);
std::vector<double> OracleNextTokenDist(const TinyLmParams& params,
                                        const std::vector<TokenId>& bag,
                                        TokenId prev);

TinyLmParams RandomParams(std::mt19937_64& rng, std::size_t vocab_size,
                          double scale);

// Random example over ids kNumReserved..vocab_size-1 with aligned masks.
TrainingExample RandomExample(std::mt19937_64& rng, std::size_t vocab_size,
                              Origin origin, const std::string& id);

enum class GradObjective {
  kSaltL,
  kSaltLd,
  kSaltLi,
  kSaltU,
  kSaltLU,
  kSaltLiteral,
  kRsaltL,
  kRsaltLU,
  kDpo,
};

const char* Name(GradObjective o);
std::vector<GradObjective> AllGradObjectives();

struct GradCheckResult {
  int configs = 0;
  double worst_relative_error = 0.0;
};

// Central differences of OracleObjectiveValue against the analytic gradient.
// The error of one config is ||analytic - numeric|| / max(||analytic||,
// ||numeric||, 1e-12).
GradCheckResult CheckGradients(GradObjective which, int configs,
                               std::uint64_t seed, double h = 1e-5);

struct DecodeOptimum {
  std::vector<TokenId> ids;
  double score = 0.0;
};

// Raw log-probability of a finished decode, EOS included when shorter than
// max_len.
double OracleDecodeScore(const TinyLmParams& params,
                         const std::vector<TokenId>& bag,
                         const std::vector<TokenId>& ids,
                         const DecodeConfig& cfg);

// Best sequence under the decode rules by enumerating every candidate.
DecodeOptimum ExhaustiveDecode(const TinyLmParams& params,
                                      const std::vector<TokenId>& bag,
                                      const DecodeConfig& cfg);

}  // namespace salt::testing

#endif  // SALT_TESTS_ORACLES_H_
