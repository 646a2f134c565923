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

#include <nlohmann/json.hpp>

#include "salt/error.h"
#include "salt/pipeline.h"

namespace salt {
namespace {

nlohmann::ordered_json CountsJson(const std::array<double, 3>& c) {
  nlohmann::ordered_json j;
  j["g1"] = c[0];
  j["g2"] = c[1];
  j["g3"] = c[2];
  return j;
}

nlohmann::ordered_json RatiosJson(const std::array<std::optional<double>, 3>& r) {
  nlohmann::ordered_json j;
  const char* names[] = {"g1", "g2", "g3"};
  for (std::size_t k = 0; k < 3; ++k) {
    if (r[k]) {
      j[names[k]] = *r[k];
    } else {
      j[names[k]] = nullptr;  // undefined: zero baseline count
    }
  }
  return j;
}

}  // namespace

EvalReport RunEval(const TinyLmParams& params,
                   std::span<const TrainingExample> eval_set,
                   const EvalOptions& options, const std::string& variant,
                   const SageCorpus* baseline) {
  if (eval_set.empty()) throw DataError("empty evaluation set");
  const auto v = static_cast<TokenId>(params.vocab_size());
  for (const auto& ex : eval_set) {
    for (const auto* seq : {&ex.input, &ex.s_ai, &ex.s_edit}) {
      for (const auto& t : seq->tokens) {
        if (t.id < 0 || t.id >= v) {
          throw DataError("example '" + ex.id + "' has token id " +
                          std::to_string(t.id) +
                          " outside the checkpoint vocabulary of size " +
                          std::to_string(v));
        }
      }
    }
  }
  EvalReport report;
  report.variant = variant;
  std::vector<SageReport> sage;
  std::vector<PreferenceLogProbs> prefs;
  for (const auto& ex : eval_set) {
    const auto bag = ex.input.ids();
    std::vector<TokenId> ids = DecodeIds(params, bag, options.decode);
    TokenSeq s_new;
    for (TokenId id : ids) s_new.tokens.push_back({"", id});
    // Surfaces come from the example's own tokens where possible so UNK
    // inputs keep their text; generated ids never include UNK.
    for (auto& t : s_new.tokens) {
      for (const auto* seq : {&ex.s_edit, &ex.s_ai, &ex.input}) {
        for (const auto& known : seq->tokens) {
          if (known.id == t.id) t.surface = known.surface;
        }
        if (!t.surface.empty()) break;
      }
    }
    report.rouge1 += RougeN(s_new, ex.s_edit, 1).f1;
    report.rouge2 += RougeN(s_new, ex.s_edit, 2).f1;
    report.rougeL += RougeL(s_new, ex.s_edit).f1;
    SageReport r;
    r.word = SageWord(s_new, ex.s_ai, ex.s_edit, options.stopwords,
                      options.count_mode);
    r.concept_level = SageConcept(s_new, ex.s_ai, ex.s_edit, options.lexicon);
    sage.push_back(r);
    if (options.reference) {
      const auto chosen = WithEos(ex.s_edit.ids());
      const auto rejected = WithEos(ex.s_ai.ids());
      prefs.push_back({SequenceLogProb(params, bag, chosen),
                       SequenceLogProb(params, bag, rejected),
                       SequenceLogProb(*options.reference, bag, chosen),
                       SequenceLogProb(*options.reference, bag, rejected)});
    }
    report.outputs.push_back(std::move(ids));
  }
  const double n = static_cast<double>(eval_set.size());
  report.rouge1 /= n;
  report.rouge2 /= n;
  report.rougeL /= n;
  report.sage = AggregateSage(sage, options.aggregation);
  if (baseline) report.ratios = SageRatioReport(report.sage, *baseline);
  if (options.reference) {
    report.reward_accuracy = RewardsAndAccuracy(prefs, options.dpo).accuracy;
  }
  return report;
}

std::string ToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["variant"] = report.variant;
  j["rouge1"] = report.rouge1;
  j["rouge2"] = report.rouge2;
  j["rougeL"] = report.rougeL;
  j["sage"] = {{"word", CountsJson(report.sage.word)},
               {"concept", CountsJson(report.sage.concept_level)}};
  j["examples"] = report.sage.examples;
  if (report.ratios) {
    j["ratios_vs_baseline"] = {{"word", RatiosJson(report.ratios->word)},
                               {"concept", RatiosJson(report.ratios->concept_level)}};
  } else {
    j["ratios_vs_baseline"] = nullptr;
  }
  if (report.reward_accuracy) j["reward_accuracy"] = *report.reward_accuracy;
  return j.dump(2);
}

SageCorpus ParseSageCorpus(const std::string& report_json) {
  try {
    const auto j = nlohmann::json::parse(report_json);
    SageCorpus c;
    const auto& sage = j.at("sage");
    const char* names[] = {"g1", "g2", "g3"};
    for (std::size_t k = 0; k < 3; ++k) {
      c.word[k] = sage.at("word").at(names[k]).get<double>();
      c.concept_level[k] = sage.at("concept").at(names[k]).get<double>();
    }
    c.examples = j.value("examples", std::size_t{0});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed metric report: ") + e.what());
  }
}

}  // namespace salt
