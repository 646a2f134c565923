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

#ifndef SALT_LOSS_H_
#define SALT_LOSS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salt/align.h"
#include "salt/example.h"

namespace salt {

inline constexpr double kProbEpsilon = 1e-7;

double ClampProb(double p);

// -log(1 - p): pushes the probability of a token down.
double TermUnlikelihood(double p);
// -log p: pushes the probability of a token up.
double TermLikelihood(double p);

// Weight magnitudes per mask class. The term kind carries the direction, so
// all weights are non-negative.
struct LossWeights {
  double ai_changed = 1.0;
  double ai_unchanged = 1.0;
  double edit_changed = 1.0;
  double edit_unchanged = 1.0;

  void Validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

enum class SaltVariant {
  kL,   // likelihood on the edited summary
  kLd,  // kL with down-weighted edit-changed tokens
  kLi,  // kL with up-weighted edit-changed tokens
  kU,   // unlikelihood training on the AI summary only
  kLU,  // both sides
};

enum class ReplayVariant {
  kNone,
  kL,   // likelihood on replayed imitation summaries
  kLU,  // both sides on replayed pairs
};

std::string_view ToString(SaltVariant v);
LossWeights PresetWeights(SaltVariant v);
bool UsesAiSide(SaltVariant v);
bool UsesEditSide(SaltVariant v);

// How edit-side changed tokens are scored. kLikelihood raises their
// probability with weight `edit_changed`; kLiteral applies the unlikelihood
// term to them instead, which lowers the probability of inserted words.
enum class EditSideForm { kLikelihood, kLiteral };

enum class TermKind { kLikelihood, kUnlikelihood };
enum class LossSide { kAi, kEdit };

// One weighted term on one scored position.
struct TokenTerm {
  std::size_t position = 0;
  LossSide side = LossSide::kAi;
  TermKind kind = TermKind::kLikelihood;
  double weight = 0.0;
};

struct TokenLoss {
  std::size_t position = 0;
  LossSide side = LossSide::kAi;
  TermKind kind = TermKind::kLikelihood;
  double value = 0.0;  // weighted
};

struct LossBreakdown {
  double total = 0.0;
  double ai_side = 0.0;
  double edit_side = 0.0;
  std::vector<TokenLoss> per_token;

  LossBreakdown& operator+=(const LossBreakdown& other);
  LossBreakdown Scaled(double factor) const;
};

// Per-position probabilities of realized tokens, clamped to
// [kProbEpsilon, 1 - kProbEpsilon].
using TokenProbs = std::vector<double>;

std::vector<TokenTerm> AiSideTerms(const EditMasks& masks,
                                   const LossWeights& w);
std::vector<TokenTerm> EditSideTerms(
    const EditMasks& masks, const LossWeights& w,
    EditSideForm form = EditSideForm::kLikelihood);

double EvaluateTerm(TermKind kind, double p);
LossBreakdown EvaluateTerms(std::span<const double> probs,
                            std::span<const TokenTerm> terms);

LossBreakdown LossAiSide(std::span<const double> probs, const EditMasks& masks,
                         const LossWeights& w);
LossBreakdown LossEditSide(std::span<const double> probs,
                           const EditMasks& masks, const LossWeights& w,
                           EditSideForm form = EditSideForm::kLikelihood);

struct SaltOptions {
  SaltVariant variant = SaltVariant::kLU;
  EditSideForm edit_form = EditSideForm::kLikelihood;
};

// Terms of the SALT objective for one example, split per scored sequence.
struct SaltTerms {
  std::vector<TokenTerm> ai;
  std::vector<TokenTerm> edit;
};

SaltTerms BuildSaltTerms(const EditMasks& masks, const LossWeights& w,
                         const SaltOptions& options);

LossBreakdown LossSalt(const TrainingExample& example,
                       std::span<const double> probs_ai,
                       std::span<const double> probs_edit,
                       const LossWeights& w, const SaltOptions& options = {});

struct ExampleProbs {
  const TrainingExample* example = nullptr;
  TokenProbs ai;
  TokenProbs edit;
};

struct RsaltOptions {
  SaltOptions salt;
  ReplayVariant replay = ReplayVariant::kL;
};

// Summed SALT loss over unseen examples plus the replay loss over seen ones.
LossBreakdown LossRsalt(std::span<const ExampleProbs> unseen,
                        std::span<const ExampleProbs> seen,
                        const LossWeights& w, const RsaltOptions& options);

struct DpoConfig {
  double beta = 0.1;

  void Validate() const;
};

// Sequence log-probabilities of one preference pair. Chosen is the edited
// summary, rejected is the AI summary.
struct PreferenceLogProbs {
  double chosen_policy = 0.0;
  double rejected_policy = 0.0;
  double chosen_ref = 0.0;
  double rejected_ref = 0.0;
};

// Margin beta * (lRatio_policy - lRatio_ref).
double DpoMargin(const PreferenceLogProbs& lp, const DpoConfig& cfg);
double DpoLoss(const PreferenceLogProbs& lp, const DpoConfig& cfg);

// -log sigmoid(x), stable for large |x|.
double NegLogSigmoid(double x);
double Sigmoid(double x);

struct RewardSummary {
  std::vector<double> chosen;
  std::vector<double> rejected;
  double accuracy = 0.0;  // ties count as losses
};

RewardSummary RewardsAndAccuracy(std::span<const PreferenceLogProbs> pairs,
                                 const DpoConfig& cfg);

}  // namespace salt

#endif  // SALT_LOSS_H_
