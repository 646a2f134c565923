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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace salt::testing {

int OracleSubstitution(const std::string& a, const std::string& b,
                       const PlainScores& s) {
  if (a == b) return s.match;
  const std::string& shorter = a.size() < b.size() ? a : b;
  const std::string& longer = a.size() < b.size() ? b : a;
  if (shorter.size() >= 3 && shorter.size() < longer.size() &&
      longer.substr(0, shorter.size()) == shorter) {
    return s.near_match;
  }
  return s.mismatch;
}

int BruteForceAlignScore(const std::vector<std::string>& a,
                         const std::vector<std::string>& b,
                         const PlainScores& s) {
  // Walks every op sequence without memoization.
  std::function<int(std::size_t, std::size_t)> walk = [&](std::size_t i,
                                                          std::size_t j) {
    if (i == a.size() && j == b.size()) return 0;
    int best = std::numeric_limits<int>::min();
    if (i < a.size() && j < b.size()) {
      best = std::max(best, OracleSubstitution(a[i], b[j], s) + walk(i + 1, j + 1));
    }
    if (i < a.size()) best = std::max(best, s.gap + walk(i + 1, j));
    if (j < b.size()) best = std::max(best, s.gap + walk(i, j + 1));
    return best;
  };
  return walk(0, 0);
}

std::size_t BruteForceLcs(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    // Greedy embedding decides whether `sub` is a subsequence of `b`.
    std::size_t k = 0;
    for (const auto& w : b) {
      if (k < sub.size() && sub[k] == w) ++k;
    }
    if (k == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

TokenSeq MakeSeq(const std::vector<std::string>& words) {
  static Vocab vocab;
  TokenSeq seq;
  for (const auto& w : words) seq.tokens.push_back({w, vocab.Add(w)});
  return seq;
}

std::vector<std::string> RandomWords(std::mt19937_64& rng, std::size_t max_len,
                                     std::size_t alphabet, bool allow_empty) {
  // "take"/"takes" exercises the near-match score.
  static const std::vector<std::string> pool = {"take", "takes", "dose", "pain",
                                                "daily", "aspirin"};
  alphabet = std::min(alphabet, pool.size());
  std::uniform_int_distribution<std::size_t> len(allow_empty ? 0 : 1, max_len);
  std::uniform_int_distribution<std::size_t> word(0, alphabet - 1);
  std::vector<std::string> out(len(rng));
  for (auto& w : out) w = pool[word(rng)];
  return out;
}

std::vector<double> OracleNextTokenDist(const TinyLmParams& params,
                                        const std::vector<TokenId>& bag,
                                        TokenId prev) {
  const std::size_t v = params.vocab_size();
  std::vector<double> logits(v);
  for (std::size_t w = 0; w < v; ++w) {
    double z = params.bias[static_cast<Eigen::Index>(w)] +
               params.prev_logits(prev, static_cast<Eigen::Index>(w));
    for (TokenId u : bag) z += params.input_logits(u, static_cast<Eigen::Index>(w));
    logits[w] = z;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& z : logits) {
    z = std::exp(z - top);
    total += z;
  }
  for (auto& z : logits) z /= total;
  return logits;
}

namespace {

std::vector<double> OracleProbs(const TinyLmParams& params,
                                const std::vector<TokenId>& bag,
                                const std::vector<TokenId>& target) {
  std::vector<double> out;
  TokenId prev = kBosId;
  for (TokenId t : target) {
    const double p = OracleNextTokenDist(params, bag, prev)[static_cast<std::size_t>(t)];
    out.push_back(std::clamp(p, 1e-7, 1.0 - 1e-7));
    prev = t;
  }
  return out;
}

double OracleLogProb(const TinyLmParams& params, const std::vector<TokenId>& bag,
                     const std::vector<TokenId>& target) {
  double lp = 0.0;
  for (double p : OracleProbs(params, bag, target)) lp += std::log(p);
  return lp;
}

}  // namespace

double OracleObjectiveValue(const TinyLmParams& params, const Objective& obj) {
  double total = 0.0;
  for (const auto& seq : obj.sequences) {
    const auto probs = OracleProbs(params, seq.input_bag, seq.target);
    for (const auto& term : seq.terms) {
      const double p = probs.at(term.position);
      const double value =
          term.kind == TermKind::kLikelihood ? -std::log(p) : -std::log(1.0 - p);
      total += term.weight * value;
    }
  }
  for (const auto& pair : obj.pairs) {
    const double chosen = OracleLogProb(params, pair.input_bag, pair.chosen);
    const double rejected = OracleLogProb(params, pair.input_bag, pair.rejected);
    const double x = obj.dpo.beta *
                     ((chosen - pair.chosen_ref) - (rejected - pair.rejected_ref));
    total += std::log1p(std::exp(-x));
  }
  return obj.scale * total;
}

TinyLmParams RandomParams(std::mt19937_64& rng, std::size_t vocab_size,
                          double scale) {
  std::normal_distribution<double> g(0.0, scale);
  TinyLmParams p = TinyLmParams::Zeros(vocab_size);
  for (std::size_t i = 0; i < p.num_params(); ++i) p.Flat(i) = g(rng);
  return p;
}

TrainingExample RandomExample(std::mt19937_64& rng, std::size_t vocab_size,
                              Origin origin, const std::string& id) {
  std::uniform_int_distribution<TokenId> tok(kNumReserved,
                                             static_cast<TokenId>(vocab_size) - 1);
  std::uniform_int_distribution<int> len(1, 6);
  auto seq = [&](int n, SourceRole role) {
    TokenSeq s;
    s.role = role;
    for (int i = 0; i < n; ++i) {
      const TokenId t = tok(rng);
      s.tokens.push_back({"w" + std::to_string(t), t});
    }
    return s;
  };
  TrainingExample ex;
  ex.id = id;
  ex.origin = origin;
  ex.input = seq(len(rng), SourceRole::kInput);
  ex.s_ai = seq(len(rng), SourceRole::kAiSummary);
  ex.s_edit = seq(len(rng), SourceRole::kEditSummary);
  RecomputeMasks(ex, IngestOptions{});
  return ex;
}

const char* Name(GradObjective o) {
  switch (o) {
    case GradObjective::kSaltL: return "salt_l";
    case GradObjective::kSaltLd: return "salt_ld";
    case GradObjective::kSaltLi: return "salt_li";
    case GradObjective::kSaltU: return "salt_u";
    case GradObjective::kSaltLU: return "salt_lu";
    case GradObjective::kSaltLiteral: return "salt_lu_literal";
    case GradObjective::kRsaltL: return "rsalt_l";
    case GradObjective::kRsaltLU: return "rsalt_lu";
    case GradObjective::kDpo: return "dpo";
  }
  return "?";
}

std::vector<GradObjective> AllGradObjectives() {
  return {GradObjective::kSaltL,       GradObjective::kSaltLd,
          GradObjective::kSaltLi,      GradObjective::kSaltU,
          GradObjective::kSaltLU,      GradObjective::kSaltLiteral,
          GradObjective::kRsaltL,      GradObjective::kRsaltLU,
          GradObjective::kDpo};
}

namespace {

Objective BuildRandomObjective(GradObjective which, std::mt19937_64& rng,
                               std::size_t vocab_size,
                               std::vector<TrainingExample>& storage) {
  std::uniform_int_distribution<int> count(1, 3);
  storage.clear();
  const int n_unseen = count(rng);
  const bool replay = which == GradObjective::kRsaltL || which == GradObjective::kRsaltLU;
  const int n_seen = replay ? count(rng) : 0;
  storage.reserve(static_cast<std::size_t>(n_unseen + n_seen));
  for (int i = 0; i < n_unseen; ++i) {
    storage.push_back(RandomExample(rng, vocab_size, Origin::kUnseen, "u"));
  }
  for (int i = 0; i < n_seen; ++i) {
    storage.push_back(RandomExample(rng, vocab_size, Origin::kSeen, "s"));
    storage.back().kept = true;  // the discard filter is not under test here
  }
  std::vector<const TrainingExample*> unseen;
  std::vector<const TrainingExample*> seen;
  for (const auto& e : storage) {
    (e.origin == Origin::kSeen ? seen : unseen).push_back(&e);
  }

  if (which == GradObjective::kDpo) {
    std::uniform_real_distribution<double> beta(0.05, 1.0);
    DpoConfig cfg;
    cfg.beta = beta(rng);
    const TinyLmParams reference = RandomParams(rng, vocab_size, 0.5);
    return BuildDpoObjective(unseen, reference, cfg);
  }

  ObjectiveOptions options;
  SaltVariant variant = SaltVariant::kLU;
  switch (which) {
    case GradObjective::kSaltL: variant = SaltVariant::kL; break;
    case GradObjective::kSaltLd: variant = SaltVariant::kLd; break;
    case GradObjective::kSaltLi: variant = SaltVariant::kLi; break;
    case GradObjective::kSaltU: variant = SaltVariant::kU; break;
    case GradObjective::kSaltLiteral:
      options.rsalt.salt.edit_form = EditSideForm::kLiteral;
      break;
    default: break;
  }
  options.rsalt.salt.variant = variant;
  options.rsalt.replay = which == GradObjective::kRsaltL    ? ReplayVariant::kL
                         : which == GradObjective::kRsaltLU ? ReplayVariant::kLU
                                                            : ReplayVariant::kNone;
  std::bernoulli_distribution coin(0.5);
  options.append_eos = coin(rng);
  options.mean_reduction = coin(rng);
  return BuildSaltObjective(unseen, seen, PresetWeights(variant), options);
}

}  // namespace

GradCheckResult CheckGradients(GradObjective which, int configs,
                               std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> vocab(kNumReserved + 2, kNumReserved + 5);
  GradCheckResult result;
  std::vector<TrainingExample> storage;
  for (int c = 0; c < configs; ++c) {
    const std::size_t v = vocab(rng);
    const Objective obj = BuildRandomObjective(which, rng, v, storage);
    TinyLmParams params = RandomParams(rng, v, 0.5);
    const TinyLmParams analytic = ObjectiveWithGradient(params, obj).gradient;
    double diff2 = 0.0;
    double a2 = 0.0;
    double n2 = 0.0;
    for (std::size_t i = 0; i < params.num_params(); ++i) {
      const double x = params.Flat(i);
      params.Flat(i) = x + h;
      const double up = OracleObjectiveValue(params, obj);
      params.Flat(i) = x - h;
      const double down = OracleObjectiveValue(params, obj);
      params.Flat(i) = x;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.Flat(i);
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    const double denom = std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
    result.worst_relative_error =
        std::max(result.worst_relative_error, std::sqrt(diff2) / denom);
    ++result.configs;
  }
  return result;
}

double OracleDecodeScore(const TinyLmParams& params,
                         const std::vector<TokenId>& bag,
                         const std::vector<TokenId>& ids,
                         const DecodeConfig& cfg) {
  double score = 0.0;
  TokenId prev = kBosId;
  for (TokenId t : ids) {
    score += std::log(OracleNextTokenDist(params, bag, prev)[static_cast<std::size_t>(t)]);
    prev = t;
  }
  if (static_cast<int>(ids.size()) < cfg.max_len) {
    score += std::log(OracleNextTokenDist(params, bag, prev)[kEosId]);
  }
  return score;
}

DecodeOptimum ExhaustiveDecode(const TinyLmParams& params,
                               const std::vector<TokenId>& bag,
                               const DecodeConfig& cfg) {
  const auto v = static_cast<TokenId>(params.vocab_size());
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<TokenId> best;
  auto offer = [&](const std::vector<TokenId>& ids, double score) {
    if (score > best_score || (score == best_score && ids < best)) {
      best_score = score;
      best = ids;
    }
  };
  auto repeats = [&](const std::vector<TokenId>& ids, TokenId next) {
    const int n = cfg.no_repeat_ngram;
    if (n <= 0 || static_cast<int>(ids.size()) + 1 < n) return false;
    std::vector<TokenId> gram(ids.end() - (n - 1), ids.end());
    gram.push_back(next);
    for (std::size_t s = 0; s + static_cast<std::size_t>(n) <= ids.size(); ++s) {
      if (std::equal(gram.begin(), gram.end(), ids.begin() + static_cast<long>(s))) {
        return true;
      }
    }
    return false;
  };
  std::function<void(std::vector<TokenId>&, double)> walk =
      [&](std::vector<TokenId>& ids, double score) {
        const int len = static_cast<int>(ids.size());
        if (len == cfg.max_len) {
          offer(ids, score);
          return;
        }
        const auto dist =
            OracleNextTokenDist(params, bag, ids.empty() ? kBosId : ids.back());
        bool extended = false;
        if (len >= cfg.min_len) {
          offer(ids, score + std::log(dist[kEosId]));
          extended = true;
        }
        for (TokenId w = kNumReserved; w < v; ++w) {
          if (repeats(ids, w)) continue;
          ids.push_back(w);
          walk(ids, score + std::log(dist[static_cast<std::size_t>(w)]));
          ids.pop_back();
          extended = true;
        }
        if (!extended) offer(ids, score);
      };
  std::vector<TokenId> ids;
  walk(ids, 0.0);
  return {best, best_score};
}

}  // namespace salt::testing
