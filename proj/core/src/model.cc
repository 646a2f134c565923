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

#include "salt/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "salt/error.h"

namespace salt {
namespace {

void CheckId(TokenId id, std::size_t vocab_size) {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
    throw InvalidArgument("token id " + std::to_string(id) +
                          " out of range for model vocabulary of size " +
                          std::to_string(vocab_size));
  }
}

Eigen::VectorXd InputLogits(const TinyLmParams& params,
                            std::span<const TokenId> input_bag) {
  const std::size_t v = params.vocab_size();
  Eigen::VectorXd acc = params.bias;
  for (TokenId u : input_bag) {
    CheckId(u, v);
    acc += params.input_logits.row(u).transpose();
  }
  return acc;
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits) {
  const double max = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - max).exp();
  return e / e.sum();
}

// d(term)/d(logits) for one position with distribution `p` and realized
// token `y`. The clamp on p is flat outside [eps, 1 - eps].
void AddTermLogitGrad(TermKind kind, double weight, const Eigen::VectorXd& p,
                      TokenId y, Eigen::VectorXd& dz) {
  const double py = p[y];
  if (py < kProbEpsilon || py > 1.0 - kProbEpsilon) return;
  if (kind == TermKind::kLikelihood) {
    dz.noalias() += weight * p;
    dz[y] -= weight;
  } else {
    const double c = weight * py / (1.0 - py);
    dz.noalias() -= c * p;
    dz[y] += c;
  }
}

// Accumulates value and (optionally) gradient of sum_t coeff_t * term_t for
// one target sequence.
double AccumulateSequence(const TinyLmParams& params,
                          std::span<const TokenId> input_bag,
                          std::span<const TokenId> target,
                          std::span<const TokenTerm> terms, double scale,
                          TinyLmParams* grad) {
  const std::size_t v = params.vocab_size();
  const Eigen::VectorXd base = InputLogits(params, input_bag);
  std::vector<std::vector<const TokenTerm*>> by_pos(target.size());
  for (const auto& term : terms) {
    if (term.position >= target.size()) {
      throw InvalidArgument("token term beyond target length");
    }
    by_pos[term.position].push_back(&term);
  }

  double value = 0.0;
  Eigen::VectorXd dz_total;
  if (grad) dz_total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v));
  Eigen::VectorXd dz(static_cast<Eigen::Index>(v));
  TokenId prev = kBosId;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const TokenId y = target[t];
    CheckId(y, v);
    if (!by_pos[t].empty()) {
      const Eigen::VectorXd p =
          Softmax(base + params.prev_logits.row(prev).transpose());
      if (grad) dz.setZero();
      for (const TokenTerm* term : by_pos[t]) {
        const double w = scale * term->weight;
        value += w * EvaluateTerm(term->kind, p[y]);
        if (grad) AddTermLogitGrad(term->kind, w, p, y, dz);
      }
      if (grad) {
        grad->prev_logits.row(prev) += dz.transpose();
        dz_total += dz;
      }
    }
    prev = y;
  }
  if (grad) {
    grad->bias += dz_total;
    for (TokenId u : input_bag) grad->input_logits.row(u) += dz_total.transpose();
  }
  return value;
}

std::vector<TokenTerm> LikelihoodTerms(std::size_t n, double weight) {
  std::vector<TokenTerm> terms;
  terms.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    terms.push_back({t, LossSide::kEdit, TermKind::kLikelihood, weight});
  }
  return terms;
}

double Evaluate(const TinyLmParams& params, const Objective& objective,
                TinyLmParams* grad) {
  double value = 0.0;
  for (const auto& seq : objective.sequences) {
    value += AccumulateSequence(params, seq.input_bag, seq.target, seq.terms,
                                objective.scale, grad);
  }
  if (!objective.pairs.empty()) objective.dpo.Validate();
  for (const auto& pair : objective.pairs) {
    PreferenceLogProbs lp;
    lp.chosen_policy = SequenceLogProb(params, pair.input_bag, pair.chosen);
    lp.rejected_policy = SequenceLogProb(params, pair.input_bag, pair.rejected);
    lp.chosen_ref = pair.chosen_ref;
    lp.rejected_ref = pair.rejected_ref;
    const double margin = DpoMargin(lp, objective.dpo);
    value += objective.scale * NegLogSigmoid(margin);
    if (grad) {
      // dL/dm = -sigmoid(-m); d(log pi)/dtheta = -d(NLL)/dtheta.
      const double c = objective.scale * objective.dpo.beta * Sigmoid(-margin);
      const auto chosen_terms = LikelihoodTerms(pair.chosen.size(), c);
      const auto rejected_terms = LikelihoodTerms(pair.rejected.size(), -c);
      AccumulateSequence(params, pair.input_bag, pair.chosen, chosen_terms,
                         1.0, grad);
      AccumulateSequence(params, pair.input_bag, pair.rejected,
                         rejected_terms, 1.0, grad);
    }
  }
  return value;
}

std::vector<TokenId> Ids(const TokenSeq& seq) { return seq.ids(); }

}  // namespace

TinyLmParams TinyLmParams::Zeros(std::size_t vocab_size) {
  const auto n = static_cast<Eigen::Index>(vocab_size);
  TinyLmParams p;
  p.prev_logits = Matrix::Zero(n, n);
  p.input_logits = Matrix::Zero(n, n);
  p.bias = Eigen::VectorXd::Zero(n);
  return p;
}

std::size_t TinyLmParams::num_params() const {
  return static_cast<std::size_t>(prev_logits.size() + input_logits.size() +
                                  bias.size());
}

bool TinyLmParams::AllFinite() const {
  return prev_logits.allFinite() && input_logits.allFinite() &&
         bias.allFinite();
}

double& TinyLmParams::Flat(std::size_t index) {
  const auto i = static_cast<Eigen::Index>(index);
  if (i < prev_logits.size()) return prev_logits.data()[i];
  if (i < prev_logits.size() + input_logits.size()) {
    return input_logits.data()[i - prev_logits.size()];
  }
  return bias[i - prev_logits.size() - input_logits.size()];
}

double TinyLmParams::Flat(std::size_t index) const {
  return const_cast<TinyLmParams*>(this)->Flat(index);
}

TinyLmParams& TinyLmParams::operator+=(const TinyLmParams& other) {
  prev_logits += other.prev_logits;
  input_logits += other.input_logits;
  bias += other.bias;
  return *this;
}

TinyLmParams& TinyLmParams::operator*=(double factor) {
  prev_logits *= factor;
  input_logits *= factor;
  bias *= factor;
  return *this;
}

Eigen::VectorXd NextTokenDist(const TinyLmParams& params,
                              std::span<const TokenId> input_bag,
                              TokenId prev) {
  CheckId(prev, params.vocab_size());
  return Softmax(InputLogits(params, input_bag) +
                 params.prev_logits.row(prev).transpose());
}

TokenProbs SequenceProbs(const TinyLmParams& params,
                         std::span<const TokenId> input_bag,
                         std::span<const TokenId> target) {
  TokenProbs out;
  if (target.empty()) return out;
  const Eigen::VectorXd base = InputLogits(params, input_bag);
  out.reserve(target.size());
  TokenId prev = kBosId;
  for (TokenId y : target) {
    CheckId(y, params.vocab_size());
    const Eigen::VectorXd p =
        Softmax(base + params.prev_logits.row(prev).transpose());
    out.push_back(ClampProb(p[y]));
    prev = y;
  }
  return out;
}

double SequenceLogProb(const TinyLmParams& params,
                       std::span<const TokenId> input_bag,
                       std::span<const TokenId> target) {
  double total = 0.0;
  for (double p : SequenceProbs(params, input_bag, target)) {
    total += std::log(p);
  }
  return total;
}

double ObjectiveValue(const TinyLmParams& params, const Objective& objective) {
  return Evaluate(params, objective, nullptr);
}

ObjectiveResult ObjectiveWithGradient(const TinyLmParams& params,
                                      const Objective& objective) {
  ObjectiveResult out;
  out.gradient = TinyLmParams::Zeros(params.vocab_size());
  out.value = Evaluate(params, objective, &out.gradient);
  return out;
}

EditMasks ExtendWithEos(const EditMasks& masks) {
  EditMasks out = masks;
  out.ai_changed.push_back(false);
  out.ai_unchanged.push_back(true);
  out.e_changed.push_back(false);
  out.e_unchanged.push_back(true);
  return out;
}

std::vector<TokenId> WithEos(std::span<const TokenId> ids) {
  std::vector<TokenId> out(ids.begin(), ids.end());
  out.push_back(kEosId);
  return out;
}

Objective BuildSaltObjective(std::span<const TrainingExample* const> unseen,
                             std::span<const TrainingExample* const> seen,
                             const LossWeights& w,
                             const ObjectiveOptions& options) {
  w.Validate();
  Objective obj;
  auto add = [&](const TrainingExample& ex, const SaltOptions& salt) {
    if (!ex.masks) {
      throw InvalidArgument("example '" + ex.id + "' has no edit masks");
    }
    if (!ex.kept) {
      throw InvalidArgument("discarded example '" + ex.id +
                            "' passed to the training objective");
    }
    const EditMasks masks =
        options.append_eos ? ExtendWithEos(*ex.masks) : *ex.masks;
    auto target = [&](const TokenSeq& s) {
      return options.append_eos ? WithEos(Ids(s)) : Ids(s);
    };
    const SaltTerms terms = BuildSaltTerms(masks, w, salt);
    const auto bag = Ids(ex.input);
    if (!terms.ai.empty()) obj.sequences.push_back({bag, target(ex.s_ai), terms.ai});
    if (!terms.edit.empty()) {
      obj.sequences.push_back({bag, target(ex.s_edit), terms.edit});
    }
  };
  for (const auto* ex : unseen) add(*ex, options.rsalt.salt);
  if (options.rsalt.replay != ReplayVariant::kNone) {
    SaltOptions replay = options.rsalt.salt;
    replay.variant = options.rsalt.replay == ReplayVariant::kL ? SaltVariant::kL
                                                               : SaltVariant::kLU;
    for (const auto* ex : seen) add(*ex, replay);
  }
  const std::size_t n = unseen.size() +
                        (options.rsalt.replay == ReplayVariant::kNone ? 0 : seen.size());
  if (options.mean_reduction && n > 0) obj.scale = 1.0 / static_cast<double>(n);
  return obj;
}

Objective BuildDpoObjective(std::span<const TrainingExample* const> examples,
                            const TinyLmParams& reference,
                            const DpoConfig& cfg, bool append_eos,
                            bool mean_reduction) {
  cfg.Validate();
  Objective obj;
  obj.dpo = cfg;
  for (const auto* ex : examples) {
    PreferencePair pair;
    pair.input_bag = Ids(ex->input);
    pair.chosen = append_eos ? WithEos(Ids(ex->s_edit)) : Ids(ex->s_edit);
    pair.rejected = append_eos ? WithEos(Ids(ex->s_ai)) : Ids(ex->s_ai);
    pair.chosen_ref = SequenceLogProb(reference, pair.input_bag, pair.chosen);
    pair.rejected_ref =
        SequenceLogProb(reference, pair.input_bag, pair.rejected);
    obj.pairs.push_back(std::move(pair));
  }
  if (mean_reduction && !examples.empty()) {
    obj.scale = 1.0 / static_cast<double>(examples.size());
  }
  return obj;
}

OptimizerState OptimizerState::Init(const TinyLmParams& params,
                                    const AdamConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw InvalidArgument("learning rate must be positive");
  }
  OptimizerState s;
  s.config = config;
  s.first_moment = TinyLmParams::Zeros(params.vocab_size());
  s.second_moment = TinyLmParams::Zeros(params.vocab_size());
  return s;
}

void OptStep(TinyLmParams& params, const TinyLmParams& gradient,
             OptimizerState& state) {
  if (gradient.vocab_size() != params.vocab_size() ||
      state.first_moment.vocab_size() != params.vocab_size()) {
    throw InvalidArgument("optimizer shapes do not match parameters");
  }
  if (!gradient.AllFinite()) {
    throw Diverged("diverged: non-finite gradient at step " +
                   std::to_string(state.step + 1));
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    param.array() -= c.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + c.epsilon);
  };
  update(params.prev_logits, gradient.prev_logits, state.first_moment.prev_logits,
         state.second_moment.prev_logits);
  update(params.input_logits, gradient.input_logits,
         state.first_moment.input_logits, state.second_moment.input_logits);
  update(params.bias, gradient.bias, state.first_moment.bias,
         state.second_moment.bias);
}

void DecodeConfig::Validate() const {
  if (beam_size < 1) throw InvalidArgument("beam size must be at least 1");
  if (no_repeat_ngram < 0) throw InvalidArgument("no_repeat_ngram must be >= 0");
  if (min_len < 0 || max_len < 1 || min_len > max_len) {
    throw InvalidArgument("decode lengths need 0 <= min_len <= max_len, max_len >= 1");
  }
}

namespace {

struct Hypothesis {
  std::vector<TokenId> ids;  // generated tokens, no BOS / EOS
  double score = 0.0;
  bool finished = false;
};

bool Better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.ids < b.ids;
}

bool RepeatsNgram(const std::vector<TokenId>& ids, TokenId next, int n) {
  if (n <= 0) return false;
  const auto size = static_cast<int>(ids.size());
  if (size + 1 < n) return false;
  // Candidate n-gram: ids[size-n+1 .. size-1] + next.
  for (int start = 0; start + n <= size; ++start) {
    bool same = ids[start + n - 1] == next;
    for (int k = 0; same && k < n - 1; ++k) {
      same = ids[start + k] == ids[size - n + 1 + k];
    }
    if (same) return true;
  }
  return false;
}

}  // namespace

std::vector<TokenId> DecodeIds(const TinyLmParams& params,
                               std::span<const TokenId> input_bag,
                               const DecodeConfig& cfg) {
  cfg.Validate();
  const std::size_t v = params.vocab_size();
  const Eigen::VectorXd base = InputLogits(params, input_bag);
  const auto beam = static_cast<std::size_t>(cfg.beam_size);

  std::vector<Hypothesis> live{Hypothesis{}};
  std::vector<Hypothesis> finished;
  for (int len = 0; len < cfg.max_len && !live.empty(); ++len) {
    std::vector<Hypothesis> candidates;
    for (const auto& h : live) {
      const TokenId prev = h.ids.empty() ? kBosId : h.ids.back();
      const Eigen::VectorXd logp =
          (Softmax(base + params.prev_logits.row(prev).transpose()).array())
              .log();
      bool expanded = false;
      for (std::size_t w = 0; w < v; ++w) {
        const auto id = static_cast<TokenId>(w);
        if (id == kPadId || id == kBosId || id == kUnkId) continue;
        if (id == kEosId) {
          if (len < cfg.min_len) continue;
          candidates.push_back({h.ids, h.score + logp[id], true});
          expanded = true;
          continue;
        }
        if (RepeatsNgram(h.ids, id, cfg.no_repeat_ngram)) continue;
        Hypothesis next{h.ids, h.score + logp[id], false};
        next.ids.push_back(id);
        candidates.push_back(std::move(next));
        expanded = true;
      }
      if (!expanded) finished.push_back({h.ids, h.score, true});
    }
    const std::size_t keep = std::min(beam, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep,
                      candidates.end(), Better);
    candidates.resize(keep);
    live.clear();
    for (auto& c : candidates) {
      (c.finished ? finished : live).push_back(std::move(c));
    }
    if (!finished.empty() && !live.empty()) {
      const auto best_done = std::min_element(finished.begin(), finished.end(), Better);
      // Extending a hypothesis only lowers its score.
      if (best_done->score >= live.front().score) break;
    }
  }
  for (auto& h : live) finished.push_back(std::move(h));
  if (finished.empty()) return {};
  return std::min_element(finished.begin(), finished.end(), Better)->ids;
}

TokenSeq Decode(const TinyLmParams& params, const TokenSeq& input,
                const DecodeConfig& cfg, const Vocab& vocab) {
  const auto bag = input.ids();
  const auto ids = DecodeIds(params, bag, cfg);
  return FromIds(ids, vocab, SourceRole::kGenerated);
}

namespace {

constexpr int kCheckpointVersion = 1;

nlohmann::json MatrixJson(const TinyLmParams::Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).data(), m.row(r).data() + m.cols()));
  }
  return rows;
}

TinyLmParams::Matrix MatrixFromJson(const nlohmann::json& j, std::size_t v,
                                    const std::string& name) {
  if (!j.is_array() || j.size() != v) {
    throw DataError("checkpoint field " + name + " has wrong shape");
  }
  const auto n = static_cast<Eigen::Index>(v);
  TinyLmParams::Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != v) {
      throw DataError("checkpoint field " + name + " has wrong shape");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format_version"] = kCheckpointVersion;
  j["vocab_hash"] = ckpt.vocab_hash;
  j["V"] = ckpt.params.vocab_size();
  j["step"] = ckpt.step;
  j["vocab"] = ckpt.vocab;
  j["E_prev"] = MatrixJson(ckpt.params.prev_logits);
  j["E_in"] = MatrixJson(ckpt.params.input_logits);
  j["b"] = std::vector<double>(ckpt.params.bias.data(),
                               ckpt.params.bias.data() + ckpt.params.bias.size());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version");
    }
    Checkpoint ckpt;
    ckpt.vocab = j.at("vocab").get<std::vector<std::string>>();
    ckpt.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
    ckpt.step = j.at("step").get<std::int64_t>();
    const auto v = j.at("V").get<std::size_t>();
    const Vocab vocab = Vocab::FromSurfaces(ckpt.vocab);
    if (vocab.size() != v) throw DataError("checkpoint V does not match vocab");
    if (vocab.Hash() != ckpt.vocab_hash) {
      throw DataError("checkpoint vocab_hash does not match its vocabulary");
    }
    ckpt.params.prev_logits = MatrixFromJson(j.at("E_prev"), v, "E_prev");
    ckpt.params.input_logits = MatrixFromJson(j.at("E_in"), v, "E_in");
    const auto b = j.at("b").get<std::vector<double>>();
    if (b.size() != v) throw DataError("checkpoint field b has wrong shape");
    ckpt.params.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(v));
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": " + e.what());
  }
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          const Vocab& vocab) {
  Checkpoint ckpt = LoadCheckpoint(path);
  if (ckpt.vocab_hash != vocab.Hash()) {
    throw DataError("checkpoint vocabulary does not match (hash mismatch)");
  }
  return ckpt;
}

}  // namespace salt
