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

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "salt/error.h"
#include "salt/pipeline.h"

namespace salt {
namespace {

using nlohmann::json;

constexpr std::array kVariants = {
    Variant::kSaltL,        Variant::kSaltLd,       Variant::kSaltLi,
    Variant::kSaltU,        Variant::kSaltLU,       Variant::kSaltLRsaltL,
    Variant::kSaltLURsaltL, Variant::kSaltLRsaltLU, Variant::kSaltLURsaltLU,
    Variant::kDpo,
};

void RejectUnknownKeys(const json& j, std::initializer_list<const char*> known,
                       const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidArgument("unknown config key '" + where + key + "'");
  }
}

}  // namespace

std::string_view ToString(Variant v) {
  switch (v) {
    case Variant::kSaltL: return "salt_l";
    case Variant::kSaltLd: return "salt_ld";
    case Variant::kSaltLi: return "salt_li";
    case Variant::kSaltU: return "salt_u";
    case Variant::kSaltLU: return "salt_lu";
    case Variant::kSaltLRsaltL: return "salt_l_rsalt_l";
    case Variant::kSaltLURsaltL: return "salt_lu_rsalt_l";
    case Variant::kSaltLRsaltLU: return "salt_l_rsalt_lu";
    case Variant::kSaltLURsaltLU: return "salt_lu_rsalt_lu";
    case Variant::kDpo: return "dpo";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view name) {
  for (Variant v : kVariants) {
    if (ToString(v) == name) return v;
  }
  throw InvalidArgument("unknown variant '" + std::string(name) + "'");
}

std::span<const Variant> AllVariants() { return kVariants; }

bool IsDpo(Variant v) { return v == Variant::kDpo; }

SaltVariant SaltPart(Variant v) {
  switch (v) {
    case Variant::kSaltL:
    case Variant::kSaltLRsaltL:
    case Variant::kSaltLRsaltLU:
      return SaltVariant::kL;
    case Variant::kSaltLd: return SaltVariant::kLd;
    case Variant::kSaltLi: return SaltVariant::kLi;
    case Variant::kSaltU: return SaltVariant::kU;
    case Variant::kSaltLU:
    case Variant::kSaltLURsaltL:
    case Variant::kSaltLURsaltLU:
      return SaltVariant::kLU;
    case Variant::kDpo: break;
  }
  throw InvalidArgument("dpo has no SALT component");
}

ReplayVariant ReplayPart(Variant v) {
  switch (v) {
    case Variant::kSaltLRsaltL:
    case Variant::kSaltLURsaltL:
      return ReplayVariant::kL;
    case Variant::kSaltLRsaltLU:
    case Variant::kSaltLURsaltLU:
      return ReplayVariant::kLU;
    default:
      return ReplayVariant::kNone;
  }
}

void ReplayConfig::Validate() const {
  if (unseen < 1 || seen < 1) {
    throw InvalidArgument("replay ratio components must be >= 1");
  }
}

std::size_t ReplayConfig::SeenCount(std::size_t unseen_count) const {
  Validate();
  return unseen_count * static_cast<std::size_t>(seen) /
         static_cast<std::size_t>(unseen);
}

void ExperimentConfig::Validate() const {
  if (steps <= 0) throw InvalidArgument("steps must be > 0");
  if (batch_size <= 0) throw InvalidArgument("batch_size must be > 0");
  if (!(lr > 0.0)) throw InvalidArgument("lr must be > 0");
  if (!(discard_threshold >= 0.0 && discard_threshold <= 1.0)) {
    throw InvalidArgument("discard_threshold must lie in [0, 1]");
  }
  if (weights) weights->Validate();
  dpo.Validate();
  decode.Validate();
  ReplayConfig{replay_ratio.first, replay_ratio.second, seed}.Validate();
}

LossWeights ExperimentConfig::EffectiveWeights() const {
  if (weights) return *weights;
  return IsDpo(variant) ? LossWeights{} : PresetWeights(SaltPart(variant));
}

ExperimentConfig ParseExperimentConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  RejectUnknownKeys(j,
                    {"variant", "weights", "edit_side_form", "dpo", "steps",
                     "batch_size", "lr", "seed", "decode", "smoothing",
                     "discard_threshold", "filter_human_edits", "replay"},
                    "");
  ExperimentConfig cfg;
  try {
    if (j.contains("variant")) {
      cfg.variant = ParseVariant(j["variant"].get<std::string>());
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      RejectUnknownKeys(w, {"w_ai_c", "w_ai_nc", "w_e_c", "w_e_nc"}, "weights.");
      // Keys left out keep the variant preset.
      LossWeights lw = IsDpo(cfg.variant) ? LossWeights{}
                                          : PresetWeights(SaltPart(cfg.variant));
      lw.ai_changed = w.value("w_ai_c", lw.ai_changed);
      lw.ai_unchanged = w.value("w_ai_nc", lw.ai_unchanged);
      lw.edit_changed = w.value("w_e_c", lw.edit_changed);
      lw.edit_unchanged = w.value("w_e_nc", lw.edit_unchanged);
      cfg.weights = lw;
    }
    if (j.contains("edit_side_form")) {
      const auto form = j["edit_side_form"].get<std::string>();
      if (form == "likelihood") {
        cfg.edit_form = EditSideForm::kLikelihood;
      } else if (form == "literal") {
        cfg.edit_form = EditSideForm::kLiteral;
      } else {
        throw InvalidArgument("edit_side_form must be 'likelihood' or 'literal'");
      }
    }
    if (j.contains("dpo")) {
      RejectUnknownKeys(j["dpo"], {"beta"}, "dpo.");
      cfg.dpo.beta = j["dpo"].value("beta", cfg.dpo.beta);
    }
    cfg.steps = j.value("steps", cfg.steps);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("decode")) {
      const auto& d = j["decode"];
      RejectUnknownKeys(d, {"beam_size", "no_repeat_ngram", "min_len", "max_len"},
                        "decode.");
      cfg.decode.beam_size = d.value("beam_size", cfg.decode.beam_size);
      cfg.decode.no_repeat_ngram =
          d.value("no_repeat_ngram", cfg.decode.no_repeat_ngram);
      cfg.decode.min_len = d.value("min_len", cfg.decode.min_len);
      cfg.decode.max_len = d.value("max_len", cfg.decode.max_len);
    }
    cfg.smoothing = j.value("smoothing", cfg.smoothing);
    cfg.discard_threshold = j.value("discard_threshold", cfg.discard_threshold);
    cfg.filter_human_edits = j.value("filter_human_edits", cfg.filter_human_edits);
    if (j.contains("replay")) {
      RejectUnknownKeys(j["replay"], {"ratio"}, "replay.");
      const auto ratio = j["replay"].at("ratio").get<std::vector<int>>();
      if (ratio.size() != 2) {
        throw InvalidArgument("replay.ratio must be [unseen, seen]");
      }
      cfg.replay_ratio = {ratio[0], ratio[1]};
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseExperimentConfig(ss.str());
}

std::string ToJson(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  const LossWeights w = cfg.EffectiveWeights();
  j["variant"] = ToString(cfg.variant);
  j["weights"] = {{"w_ai_c", w.ai_changed},
                  {"w_ai_nc", w.ai_unchanged},
                  {"w_e_c", w.edit_changed},
                  {"w_e_nc", w.edit_unchanged}};
  j["edit_side_form"] =
      cfg.edit_form == EditSideForm::kLikelihood ? "likelihood" : "literal";
  j["dpo"] = {{"beta", cfg.dpo.beta}};
  j["steps"] = cfg.steps;
  j["batch_size"] = cfg.batch_size;
  j["lr"] = cfg.lr;
  j["seed"] = cfg.seed;
  j["decode"] = {{"beam_size", cfg.decode.beam_size},
                 {"no_repeat_ngram", cfg.decode.no_repeat_ngram},
                 {"min_len", cfg.decode.min_len},
                 {"max_len", cfg.decode.max_len}};
  j["smoothing"] = cfg.smoothing;
  j["discard_threshold"] = cfg.discard_threshold;
  j["filter_human_edits"] = cfg.filter_human_edits;
  j["replay"] = {{"ratio", {cfg.replay_ratio.first, cfg.replay_ratio.second}}};
  return j.dump(2);
}

}  // namespace salt
