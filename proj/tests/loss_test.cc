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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "salt/error.h"
#include "salt/loss.h"

namespace salt {
namespace {

constexpr double kTol = 1e-6;

EditMasks Masks(std::vector<bool> ai_changed, std::vector<bool> e_changed) {
  EditMasks m;
  m.ai_changed = ai_changed;
  m.e_changed = e_changed;
  for (bool b : ai_changed) m.ai_unchanged.push_back(!b);
  for (bool b : e_changed) m.e_unchanged.push_back(!b);
  return m;
}

TrainingExample WithMasks(const EditMasks& m) {
  TrainingExample ex;
  ex.masks = m;
  ex.s_ai.tokens.resize(m.ai_size());
  ex.s_edit.tokens.resize(m.edit_size());
  return ex;
}

TEST(Terms, UnlikelihoodValues) {
  EXPECT_NEAR(TermUnlikelihood(0.5), 0.693147, kTol);
  EXPECT_NEAR(TermUnlikelihood(0.9), 2.302585, kTol);
}

TEST(Terms, LikelihoodValues) {
  EXPECT_NEAR(TermLikelihood(0.5), 0.693147, kTol);
  EXPECT_NEAR(TermLikelihood(0.25), 1.386294, kTol);
}

TEST(Terms, ClampKeepsValuesFinite) {
  EXPECT_TRUE(std::isfinite(TermLikelihood(0.0)));
  EXPECT_TRUE(std::isfinite(TermUnlikelihood(1.0)));
  EXPECT_NEAR(TermLikelihood(0.0), -std::log(kProbEpsilon), 1e-9);
  EXPECT_DOUBLE_EQ(ClampProb(2.0), 1.0 - kProbEpsilon);
}

TEST(Terms, Monotone) {
  double prev_l = TermLikelihood(0.01);
  double prev_u = TermUnlikelihood(0.01);
  for (double p = 0.02; p < 0.99; p += 0.01) {
    EXPECT_LT(TermLikelihood(p), prev_l);
    EXPECT_GT(TermUnlikelihood(p), prev_u);
    prev_l = TermLikelihood(p);
    prev_u = TermUnlikelihood(p);
  }
}

TEST(LossAiSide, WorkedValue) {
  const EditMasks m = Masks({false, true}, {false});
  const std::vector<double> probs = {0.8, 0.6};
  const LossBreakdown b = LossAiSide(probs, m, LossWeights{});
  EXPECT_NEAR(b.total, -std::log(0.8) - std::log(0.4), kTol);
  EXPECT_NEAR(b.total, 1.13943, 1e-5);
  EXPECT_NEAR(b.ai_side, b.total, 1e-12);
  EXPECT_EQ(b.edit_side, 0.0);
  ASSERT_EQ(b.per_token.size(), 2u);
  EXPECT_EQ(b.per_token[1].kind, TermKind::kUnlikelihood);
}

TEST(LossAiSide, ZeroWeightsGiveZero) {
  const EditMasks m = Masks({false, true, true}, {false});
  const std::vector<double> probs = {0.3, 0.6, 0.9};
  LossWeights w{0.0, 0.0, 1.0, 1.0};
  EXPECT_EQ(LossAiSide(probs, m, w).total, 0.0);
}

TEST(LossAiSide, LengthMismatchIsAnError) {
  const EditMasks m = Masks({false, true}, {false});
  const std::vector<double> probs = {0.5};
  EXPECT_THROW(LossAiSide(probs, m, LossWeights{}), Error);
}

TEST(LossEditSide, WorkedValue) {
  const EditMasks m = Masks({false}, {false, true});
  const std::vector<double> probs = {0.5, 0.5};
  LossWeights w;
  w.edit_changed = 1.2;
  const LossBreakdown b = LossEditSide(probs, m, w);
  EXPECT_NEAR(b.total, 1.524924, kTol);
  EXPECT_NEAR(b.edit_side, b.total, 1e-12);
}

TEST(LossEditSide, LiteralFormPenalizesInsertedWords) {
  const EditMasks m = Masks({false}, {false, true});
  const std::vector<double> probs = {0.5, 0.9};
  const LossBreakdown b = LossEditSide(probs, m, LossWeights{}, EditSideForm::kLiteral);
  EXPECT_NEAR(b.total, -std::log(0.5) - std::log(0.1), kTol);
}

TEST(LossWeights, NegativeMagnitudeRejected) {
  LossWeights w;
  w.edit_changed = -0.5;
  EXPECT_THROW(w.Validate(), Error);
}

TEST(Presets, EditChangedWeights) {
  EXPECT_DOUBLE_EQ(PresetWeights(SaltVariant::kLi).edit_changed, 1.2);
  EXPECT_DOUBLE_EQ(PresetWeights(SaltVariant::kLd).edit_changed, 0.5);
  EXPECT_DOUBLE_EQ(PresetWeights(SaltVariant::kL).edit_changed, 1.0);
  EXPECT_FALSE(UsesAiSide(SaltVariant::kL));
  EXPECT_TRUE(UsesAiSide(SaltVariant::kU));
  EXPECT_FALSE(UsesEditSide(SaltVariant::kU));
  EXPECT_TRUE(UsesAiSide(SaltVariant::kLU));
  EXPECT_TRUE(UsesEditSide(SaltVariant::kLU));
}

TEST(LossSalt, BothSidesSum) {
  const EditMasks m = Masks({false, true}, {false, true});
  const TrainingExample ex = WithMasks(m);
  const std::vector<double> pa = {0.8, 0.6};
  const std::vector<double> pe = {0.5, 0.5};
  LossWeights w;
  w.edit_changed = 1.2;
  const LossBreakdown b = LossSalt(ex, pa, pe, w, {SaltVariant::kLU});
  EXPECT_NEAR(b.total, 2.664354, 1e-5);
  EXPECT_NEAR(b.ai_side + b.edit_side, b.total, 1e-12);
}

TEST(LossSalt, VariantsSelectSides) {
  const EditMasks m = Masks({false, true}, {false, true});
  const TrainingExample ex = WithMasks(m);
  const std::vector<double> pa = {0.8, 0.6};
  const std::vector<double> pe = {0.5, 0.5};
  const LossWeights w;
  EXPECT_EQ(LossSalt(ex, pa, pe, w, {SaltVariant::kL}).ai_side, 0.0);
  EXPECT_EQ(LossSalt(ex, pa, pe, w, {SaltVariant::kU}).edit_side, 0.0);
}

TEST(LossSalt, MissingMasksIsAnError) {
  TrainingExample ex;
  ex.s_ai.tokens.resize(1);
  ex.s_edit.tokens.resize(1);
  const std::vector<double> p = {0.5};
  EXPECT_THROW(LossSalt(ex, p, p, LossWeights{}), Error);
}

TEST(LossRsalt, AdditiveOverUnseenAndSeen) {
  const EditMasks m = Masks({false, true}, {false, true});
  TrainingExample unseen = WithMasks(m);
  TrainingExample seen = WithMasks(m);
  seen.origin = Origin::kSeen;
  const LossWeights w;
  RsaltOptions opt;
  opt.salt.variant = SaltVariant::kLU;
  opt.replay = ReplayVariant::kLU;
  const std::vector<ExampleProbs> u = {{&unseen, {0.8, 0.6}, {0.5, 0.5}}};
  const std::vector<ExampleProbs> s = {{&seen, {0.7, 0.2}, {0.4, 0.9}}};
  const double expected =
      LossSalt(unseen, u[0].ai, u[0].edit, w, opt.salt).total +
      LossSalt(seen, s[0].ai, s[0].edit, w, {SaltVariant::kLU}).total;
  EXPECT_NEAR(LossRsalt(u, s, w, opt).total, expected, 1e-12);
}

TEST(LossRsalt, ReplayLikelihoodIgnoresAiSide) {
  const EditMasks m = Masks({false, true}, {false, true});
  TrainingExample unseen = WithMasks(m);
  TrainingExample seen = WithMasks(m);
  RsaltOptions opt;
  opt.replay = ReplayVariant::kL;
  const std::vector<ExampleProbs> u = {{&unseen, {0.8, 0.6}, {0.5, 0.5}}};
  const std::vector<ExampleProbs> s = {{&seen, {0.7, 0.2}, {0.4, 0.9}}};
  const LossWeights w;
  const double expected = LossSalt(unseen, u[0].ai, u[0].edit, w, opt.salt).total +
                          LossEditSide(s[0].edit, m, w).total;
  EXPECT_NEAR(LossRsalt(u, s, w, opt).total, expected, 1e-12);
}

TEST(LossRsalt, EmptyUnseenIsAnError) {
  const EditMasks m = Masks({false}, {false});
  TrainingExample seen = WithMasks(m);
  const std::vector<ExampleProbs> s = {{&seen, {0.5}, {0.5}}};
  EXPECT_THROW(LossRsalt({}, s, LossWeights{}, RsaltOptions{}), Error);
}

TEST(Dpo, UntrainedLossIsLogTwo) {
  PreferenceLogProbs lp{-3.0, -5.0, -3.0, -5.0};
  EXPECT_NEAR(DpoLoss(lp, DpoConfig{}), 0.693147, kTol);
}

TEST(Dpo, ClosedFormValue) {
  // Policy ratio exceeds reference ratio by 1.0.
  PreferenceLogProbs lp{-2.0, -4.0, -3.0, -4.0};
  EXPECT_NEAR(DpoLoss(lp, DpoConfig{0.5}), 0.474077, kTol);
  EXPECT_NEAR(DpoMargin(lp, DpoConfig{0.5}), 0.5, 1e-12);
}

TEST(Dpo, ShiftInvariance) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(-10.0, 4.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    PreferenceLogProbs lp{g(rng), g(rng), g(rng), g(rng)};
    const double c = shift(rng);
    PreferenceLogProbs moved{lp.chosen_policy + c, lp.rejected_policy + c,
                             lp.chosen_ref + c, lp.rejected_ref + c};
    EXPECT_NEAR(DpoLoss(moved, DpoConfig{}), DpoLoss(lp, DpoConfig{}), 1e-9);
  }
}

TEST(Dpo, NegLogSigmoidStableAtExtremes) {
  EXPECT_NEAR(NegLogSigmoid(800.0), 0.0, 1e-12);
  EXPECT_NEAR(NegLogSigmoid(-800.0), 800.0, 1e-9);
  EXPECT_NEAR(Sigmoid(0.0), 0.5, 1e-15);
}

TEST(Dpo, BetaMustBePositive) {
  EXPECT_THROW(DpoConfig{0.0}.Validate(), Error);
}

TEST(Rewards, AccuracyCountsStrictWinsOnly) {
  const std::vector<PreferenceLogProbs> pairs = {
      {-1.0, -2.0, -1.0, -3.0},  // chosen reward 0, rejected 0.1
      {-1.0, -2.0, -2.0, -2.0},  // 0.1 vs 0
      {-1.0, -1.0, -1.0, -1.0},  // tie
      {-0.5, -4.0, -1.0, -1.0},  // 0.05 vs -0.3
  };
  const RewardSummary r = RewardsAndAccuracy(pairs, DpoConfig{0.1});
  ASSERT_EQ(r.chosen.size(), 4u);
  EXPECT_NEAR(r.chosen[1], 0.1, 1e-12);
  EXPECT_NEAR(r.rejected[3], -0.3, 1e-12);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
}

}  // namespace
}  // namespace salt
