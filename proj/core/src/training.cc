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
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "salt/error.h"
#include "salt/pipeline.h"

namespace salt {
namespace {

LossBreakdown Breakdown(const TinyLmParams& params, const Objective& obj) {
  LossBreakdown out;
  for (const auto& seq : obj.sequences) {
    const TokenProbs probs = SequenceProbs(params, seq.input_bag, seq.target);
    out += EvaluateTerms(probs, seq.terms);
  }
  return out.Scaled(obj.scale);
}

std::pair<double, double> DpoBatchStats(const TinyLmParams& params,
                                        const Objective& obj) {
  std::vector<PreferenceLogProbs> lps;
  double loss = 0.0;
  for (const auto& pair : obj.pairs) {
    PreferenceLogProbs lp;
    lp.chosen_policy = SequenceLogProb(params, pair.input_bag, pair.chosen);
    lp.rejected_policy = SequenceLogProb(params, pair.input_bag, pair.rejected);
    lp.chosen_ref = pair.chosen_ref;
    lp.rejected_ref = pair.rejected_ref;
    loss += DpoLoss(lp, obj.dpo);
    lps.push_back(lp);
  }
  const double accuracy = RewardsAndAccuracy(lps, obj.dpo).accuracy;
  return {loss * obj.scale, accuracy};
}

}  // namespace

std::string ToJsonLine(const LossRecord& record) {
  nlohmann::ordered_json j;
  j["step"] = record.step;
  j["variant"] = record.variant;
  j["total"] = record.total;
  j["ai_side"] = record.ai_side;
  j["edit_side"] = record.edit_side;
  if (record.dpo) {
    j["dpo"] = {{"loss", record.dpo->first}, {"reward_acc", record.dpo->second}};
  } else {
    j["dpo"] = nullptr;
  }
  return j.dump();
}

TrainResult RunTraining(const ExperimentConfig& cfg, const TrainingData& data,
                        const TinyLmParams& init, const Vocab& vocab) {
  cfg.Validate();
  if (init.vocab_size() != vocab.size()) {
    throw DataError("initial parameters do not match the vocabulary size");
  }
  const bool dpo = IsDpo(cfg.variant);
  const ReplayVariant replay = dpo ? ReplayVariant::kNone : ReplayPart(cfg.variant);
  const LossWeights weights = cfg.EffectiveWeights();
  const IngestOptions ingest = IngestOptionsFrom(cfg);

  std::vector<TrainingExample> stream;
  if (replay != ReplayVariant::kNone) {
    // Imitation pairs: the mixing-time model's output against ground truth.
    std::vector<TrainingExample> pool = data.seen_pool;
    for (auto& ex : pool) {
      ex.origin = Origin::kSeen;
      ex.s_ai = Decode(init, ex.input, cfg.decode, vocab);
      ex.s_ai.role = SourceRole::kAiSummary;
      RecomputeMasks(ex, ingest);
    }
    stream = MixReplay(data.unseen, pool,
                       ReplayConfig{cfg.replay_ratio.first, cfg.replay_ratio.second,
                                    cfg.seed});
  } else {
    for (const auto& ex : data.unseen) {
      if (ex.kept) stream.push_back(ex);
    }
  }
  if (stream.empty()) throw DataError("no kept training examples");

  TrainResult result;
  result.params = init;
  if (replay != ReplayVariant::kNone) {
    result.replayed = static_cast<std::size_t>(std::count_if(
        stream.begin(), stream.end(),
        [](const TrainingExample& e) { return e.origin == Origin::kSeen; }));
  }

  AdamConfig adam;
  adam.learning_rate = cfg.lr;
  OptimizerState opt = OptimizerState::Init(init, adam);
  std::mt19937_64 rng(cfg.seed ^ 0x5a17ULL);
  std::vector<std::size_t> order(stream.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  std::set<std::string> trained;

  ObjectiveOptions objective_options;
  objective_options.rsalt.salt.variant = dpo ? SaltVariant::kL : SaltPart(cfg.variant);
  objective_options.rsalt.salt.edit_form = cfg.edit_form;
  objective_options.rsalt.replay = replay;

  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  for (int step = 1; step <= cfg.steps; ++step) {
    std::vector<const TrainingExample*> unseen;
    std::vector<const TrainingExample*> seen;
    for (std::size_t b = 0; b < std::min(batch_size, stream.size()); ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const TrainingExample& ex = stream[order[cursor++]];
      // Without replay every example is primary data, whatever its origin.
      const bool replayed = replay != ReplayVariant::kNone && ex.origin == Origin::kSeen;
      (replayed ? seen : unseen).push_back(&ex);
      trained.insert(ex.id);
    }

    LossRecord record;
    record.step = step;
    record.variant = std::string(ToString(cfg.variant));
    Objective objective;
    if (dpo) {
      std::vector<const TrainingExample*> all = unseen;
      all.insert(all.end(), seen.begin(), seen.end());
      objective = BuildDpoObjective(all, init, cfg.dpo);
      record.dpo = DpoBatchStats(result.params, objective);
      record.total = record.dpo->first;
    } else {
      objective = BuildSaltObjective(unseen, seen, weights, objective_options);
      const LossBreakdown b = Breakdown(result.params, objective);
      record.total = b.total;
      record.ai_side = b.ai_side;
      record.edit_side = b.edit_side;
    }
    if (!std::isfinite(record.total)) {
      throw Diverged("diverged: non-finite loss at step " + std::to_string(step));
    }
    const ObjectiveResult r = ObjectiveWithGradient(result.params, objective);
    try {
      OptStep(result.params, r.gradient, opt);
    } catch (const Error& e) {
      throw Diverged("diverged at step " + std::to_string(step) + ": " + e.what());
    }
    result.log.push_back(std::move(record));
  }
  result.trained_ids.assign(trained.begin(), trained.end());
  return result;
}

}  // namespace salt
