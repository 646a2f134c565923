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

#include "salt/loss.h"

#include <algorithm>
#include <cmath>

#include "salt/error.h"

namespace salt {

double ClampProb(double p) {
  return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

double TermUnlikelihood(double p) { return -std::log1p(-ClampProb(p)); }

double TermLikelihood(double p) { return -std::log(ClampProb(p)); }

void LossWeights::Validate() const {
  for (double w : {ai_changed, ai_unchanged, edit_changed, edit_unchanged}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("loss weights must be finite and non-negative");
    }
  }
}

std::string_view ToString(SaltVariant v) {
  switch (v) {
    case SaltVariant::kL: return "salt_l";
    case SaltVariant::kLd: return "salt_ld";
    case SaltVariant::kLi: return "salt_li";
    case SaltVariant::kU: return "salt_u";
    case SaltVariant::kLU: return "salt_lu";
  }
  return "unknown";
}

LossWeights PresetWeights(SaltVariant v) {
  LossWeights w;
  if (v == SaltVariant::kLi) w.edit_changed = 1.2;
  if (v == SaltVariant::kLd) w.edit_changed = 0.5;
  return w;
}

bool UsesAiSide(SaltVariant v) {
  return v == SaltVariant::kU || v == SaltVariant::kLU;
}

bool UsesEditSide(SaltVariant v) { return v != SaltVariant::kU; }

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& other) {
  total += other.total;
  ai_side += other.ai_side;
  edit_side += other.edit_side;
  per_token.insert(per_token.end(), other.per_token.begin(),
                   other.per_token.end());
  return *this;
}

LossBreakdown LossBreakdown::Scaled(double factor) const {
  LossBreakdown out = *this;
  out.total *= factor;
  out.ai_side *= factor;
  out.edit_side *= factor;
  for (auto& t : out.per_token) t.value *= factor;
  return out;
}

std::vector<TokenTerm> AiSideTerms(const EditMasks& masks,
                                   const LossWeights& w) {
  std::vector<TokenTerm> terms;
  terms.reserve(masks.ai_size());
  for (std::size_t t = 0; t < masks.ai_size(); ++t) {
    if (masks.ai_changed[t]) {
      terms.push_back({t, LossSide::kAi, TermKind::kUnlikelihood, w.ai_changed});
    } else {
      terms.push_back({t, LossSide::kAi, TermKind::kLikelihood, w.ai_unchanged});
    }
  }
  return terms;
}

std::vector<TokenTerm> EditSideTerms(const EditMasks& masks,
                                     const LossWeights& w, EditSideForm form) {
  const TermKind changed_kind = form == EditSideForm::kLikelihood
                                    ? TermKind::kLikelihood
                                    : TermKind::kUnlikelihood;
  std::vector<TokenTerm> terms;
  terms.reserve(masks.edit_size());
  for (std::size_t t = 0; t < masks.edit_size(); ++t) {
    if (masks.e_changed[t]) {
      terms.push_back({t, LossSide::kEdit, changed_kind, w.edit_changed});
    } else {
      terms.push_back(
          {t, LossSide::kEdit, TermKind::kLikelihood, w.edit_unchanged});
    }
  }
  return terms;
}

double EvaluateTerm(TermKind kind, double p) {
  return kind == TermKind::kLikelihood ? TermLikelihood(p)
                                       : TermUnlikelihood(p);
}

LossBreakdown EvaluateTerms(std::span<const double> probs,
                            std::span<const TokenTerm> terms) {
  LossBreakdown out;
  out.per_token.reserve(terms.size());
  for (const auto& term : terms) {
    if (term.position >= probs.size()) {
      throw InvalidArgument("loss term position " +
                            std::to_string(term.position) +
                            " beyond scored length " +
                            std::to_string(probs.size()));
    }
    const double value =
        term.weight * EvaluateTerm(term.kind, probs[term.position]);
    out.per_token.push_back({term.position, term.side, term.kind, value});
    (term.side == LossSide::kAi ? out.ai_side : out.edit_side) += value;
  }
  out.total = out.ai_side + out.edit_side;
  return out;
}

LossBreakdown LossAiSide(std::span<const double> probs, const EditMasks& masks,
                         const LossWeights& w) {
  if (probs.size() != masks.ai_size()) {
    throw InvalidArgument("AI-side probabilities have length " +
                          std::to_string(probs.size()) + ", mask has " +
                          std::to_string(masks.ai_size()));
  }
  const auto terms = AiSideTerms(masks, w);
  return EvaluateTerms(probs, terms);
}

LossBreakdown LossEditSide(std::span<const double> probs,
                           const EditMasks& masks, const LossWeights& w,
                           EditSideForm form) {
  if (probs.size() != masks.edit_size()) {
    throw InvalidArgument("edit-side probabilities have length " +
                          std::to_string(probs.size()) + ", mask has " +
                          std::to_string(masks.edit_size()));
  }
  const auto terms = EditSideTerms(masks, w, form);
  return EvaluateTerms(probs, terms);
}

SaltTerms BuildSaltTerms(const EditMasks& masks, const LossWeights& w,
                         const SaltOptions& options) {
  SaltTerms terms;
  if (UsesAiSide(options.variant)) terms.ai = AiSideTerms(masks, w);
  if (UsesEditSide(options.variant)) {
    terms.edit = EditSideTerms(masks, w, options.edit_form);
  }
  return terms;
}

LossBreakdown LossSalt(const TrainingExample& example,
                       std::span<const double> probs_ai,
                       std::span<const double> probs_edit,
                       const LossWeights& w, const SaltOptions& options) {
  if (!example.masks) {
    throw InvalidArgument("example '" + example.id + "' has no edit masks");
  }
  const EditMasks& masks = *example.masks;
  LossBreakdown out;
  if (UsesAiSide(options.variant)) out += LossAiSide(probs_ai, masks, w);
  if (UsesEditSide(options.variant)) {
    out += LossEditSide(probs_edit, masks, w, options.edit_form);
  }
  return out;
}

LossBreakdown LossRsalt(std::span<const ExampleProbs> unseen,
                        std::span<const ExampleProbs> seen,
                        const LossWeights& w, const RsaltOptions& options) {
  if (unseen.empty()) {
    throw InvalidArgument("replay loss needs at least one unseen example");
  }
  LossBreakdown out;
  for (const auto& e : unseen) {
    out += LossSalt(*e.example, e.ai, e.edit, w, options.salt);
  }
  if (options.replay == ReplayVariant::kNone) return out;
  SaltOptions replay = options.salt;
  replay.variant =
      options.replay == ReplayVariant::kL ? SaltVariant::kL : SaltVariant::kLU;
  for (const auto& e : seen) {
    out += LossSalt(*e.example, e.ai, e.edit, w, replay);
  }
  return out;
}

void DpoConfig::Validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("DPO beta must be positive");
  }
}

double NegLogSigmoid(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double DpoMargin(const PreferenceLogProbs& lp, const DpoConfig& cfg) {
  const double policy_ratio = lp.chosen_policy - lp.rejected_policy;
  const double ref_ratio = lp.chosen_ref - lp.rejected_ref;
  return cfg.beta * (policy_ratio - ref_ratio);
}

double DpoLoss(const PreferenceLogProbs& lp, const DpoConfig& cfg) {
  cfg.Validate();
  return NegLogSigmoid(DpoMargin(lp, cfg));
}

RewardSummary RewardsAndAccuracy(std::span<const PreferenceLogProbs> pairs,
                                 const DpoConfig& cfg) {
  cfg.Validate();
  if (pairs.empty()) throw InvalidArgument("reward accuracy of an empty set");
  RewardSummary out;
  std::size_t wins = 0;
  for (const auto& lp : pairs) {
    const double chosen = cfg.beta * (lp.chosen_policy - lp.chosen_ref);
    const double rejected = cfg.beta * (lp.rejected_policy - lp.rejected_ref);
    out.chosen.push_back(chosen);
    out.rejected.push_back(rejected);
    if (chosen > rejected) ++wins;
  }
  out.accuracy = static_cast<double>(wins) / static_cast<double>(pairs.size());
  return out;
}

}  // namespace salt
