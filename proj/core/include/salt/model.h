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

#ifndef SALT_MODEL_H_
#define SALT_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "salt/example.h"
#include "salt/loss.h"
#include "salt/textproc.h"

namespace salt {

// Log-linear next-token model:
//   p(. | prev, U) = softmax(prev_logits[prev] + sum_{u in U} input_logits[u]
//                            + bias)
// Row r of each matrix is the logit contribution of token r.
struct TinyLmParams {
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Matrix prev_logits;
  Matrix input_logits;
  Eigen::VectorXd bias;

  static TinyLmParams Zeros(std::size_t vocab_size);

  std::size_t vocab_size() const {
    return static_cast<std::size_t>(bias.size());
  }
  std::size_t num_params() const;
  bool AllFinite() const;
  // Flat view in the order prev_logits, input_logits, bias (row-major per
  // matrix). Used by gradient checks.
  double& Flat(std::size_t index);
  double Flat(std::size_t index) const;

  TinyLmParams& operator+=(const TinyLmParams& other);
  TinyLmParams& operator*=(double factor);
};

// Probability vector over the vocabulary.
Eigen::VectorXd NextTokenDist(const TinyLmParams& params,
                              std::span<const TokenId> input_bag,
                              TokenId prev);

// p of target[t] given target[t-1] (BOS at t = 0) and the input bag,
// clamped to [kProbEpsilon, 1 - kProbEpsilon].
TokenProbs SequenceProbs(const TinyLmParams& params,
                         std::span<const TokenId> input_bag,
                         std::span<const TokenId> target);

// Sum of log of the clamped per-position probabilities.
double SequenceLogProb(const TinyLmParams& params,
                       std::span<const TokenId> input_bag,
                       std::span<const TokenId> target);

// A sequence scored under one input with an explicit list of token terms.
struct ScoredSequence {
  std::vector<TokenId> input_bag;
  std::vector<TokenId> target;
  std::vector<TokenTerm> terms;
};

struct PreferencePair {
  std::vector<TokenId> input_bag;
  std::vector<TokenId> chosen;
  std::vector<TokenId> rejected;
  double chosen_ref = 0.0;
  double rejected_ref = 0.0;
};

// Differentiable objective: `scale` * (sum of token terms over `sequences`
// + sum of DPO losses over `pairs`).
struct Objective {
  std::vector<ScoredSequence> sequences;
  std::vector<PreferencePair> pairs;
  DpoConfig dpo;
  double scale = 1.0;
};

struct ObjectiveResult {
  double value = 0.0;
  TinyLmParams gradient;
};

double ObjectiveValue(const TinyLmParams& params, const Objective& objective);
ObjectiveResult ObjectiveWithGradient(const TinyLmParams& params,
                                      const Objective& objective);

// Appends one unchanged position to both sides; pairs with scoring targets
// that end in EOS.
EditMasks ExtendWithEos(const EditMasks& masks);
std::vector<TokenId> WithEos(std::span<const TokenId> ids);

struct ObjectiveOptions {
  RsaltOptions rsalt;
  // Score EOS after each summary as an unchanged token.
  bool append_eos = true;
  // Divide by the number of examples (mean over the batch).
  bool mean_reduction = true;
};

// SALT over `unseen` plus the replay objective over `seen`.
Objective BuildSaltObjective(std::span<const TrainingExample* const> unseen,
                             std::span<const TrainingExample* const> seen,
                             const LossWeights& w,
                             const ObjectiveOptions& options);

// DPO with chosen = edit summary, rejected = AI summary; reference
// log-probabilities are taken from `reference`.
Objective BuildDpoObjective(std::span<const TrainingExample* const> examples,
                            const TinyLmParams& reference,
                            const DpoConfig& cfg, bool append_eos = true,
                            bool mean_reduction = true);

struct AdamConfig {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  AdamConfig config;
  TinyLmParams first_moment;
  TinyLmParams second_moment;
  std::int64_t step = 0;

  static OptimizerState Init(const TinyLmParams& params,
                             const AdamConfig& config);
};

// Bias-corrected Adam update. Throws a divergence error on non-finite
// gradients and leaves params untouched.
void OptStep(TinyLmParams& params, const TinyLmParams& gradient,
             OptimizerState& state);

struct DecodeConfig {
  int beam_size = 4;
  int no_repeat_ngram = 2;  // 0 disables
  int min_len = 10;
  int max_len = 100;

  void Validate() const;
};

// Beam search over raw sequence log-probability. Ties between equal scores
// go to the lexicographically smaller id sequence.
std::vector<TokenId> DecodeIds(const TinyLmParams& params,
                               std::span<const TokenId> input_bag,
                               const DecodeConfig& cfg);
TokenSeq Decode(const TinyLmParams& params, const TokenSeq& input,
                const DecodeConfig& cfg, const Vocab& vocab);

struct Checkpoint {
  TinyLmParams params;
  std::vector<std::string> vocab;
  std::uint64_t vocab_hash = 0;
  std::int64_t step = 0;
};

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
// Verifies the stored hash against the stored vocabulary and shapes.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);
// As above, and additionally requires the vocabulary hash to equal `vocab`.
Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          const Vocab& vocab);

}  // namespace salt

#endif  // SALT_MODEL_H_
