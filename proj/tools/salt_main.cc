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

// salt: command-line front end for the SALT toolkit.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 training divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "salt/error.h"
#include "salt/pipeline.h"

namespace fs = std::filesystem;
using salt::DataError;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;

struct CommonFlags {
  std::string config;
  std::string data;
  std::string seen_pool;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string baseline_report;
};

salt::ExperimentConfig LoadConfig(const CommonFlags& f) {
  salt::ExperimentConfig cfg =
      f.config.empty() ? salt::ExperimentConfig{} : salt::LoadExperimentConfig(f.config);
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or to stdout when it is empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

salt::Vocab LoadVocabFile(const fs::path& path) {
  salt::Vocab vocab;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) vocab.Add(line);
  }
  return vocab;
}

std::vector<salt::DatasetRecord> RequireRecords(const std::string& path,
                                                const char* flag) {
  if (path.empty()) {
    throw salt::InvalidArgument(std::string("missing required flag ") + flag);
  }
  return salt::ReadDatasetRecords(path);
}

int RunAlign(const CommonFlags& f) {
  const auto cfg = LoadConfig(f);
  const auto records = RequireRecords(f.data, "--data");
  salt::IngestOptions ingest = salt::IngestOptionsFrom(cfg);
  salt::Vocab vocab;
  std::string out;
  for (const auto& r : records) {
    const auto ex = salt::PrepareExample(r, vocab, true, ingest);
    const auto alignment = salt::AlignNw(ex.s_ai, ex.s_edit, ingest.scoring);
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["ops"] = alignment.OpString();
    j["score"] = alignment.score;
    out += j.dump() + "\n";
  }
  Emit(f.out, out);
  return 0;
}

int RunMask(const CommonFlags& f) {
  const auto cfg = LoadConfig(f);
  const auto records = RequireRecords(f.data, "--data");
  const salt::IngestOptions ingest = salt::IngestOptionsFrom(cfg);
  salt::Vocab vocab;
  const auto loaded = salt::LoadDataset(records, vocab, true, ingest);
  std::string out;
  for (const auto& ex : loaded.examples) {
    salt::MaskRecord m;
    m.id = ex.id;
    m.ai_tokens = ex.s_ai.surfaces();
    m.edit_tokens = ex.s_edit.surfaces();
    m.ops = salt::AlignNw(ex.s_ai, ex.s_edit, ingest.scoring).OpString();
    m.ai_changed = ex.masks->ai_changed;
    m.e_changed = ex.masks->e_changed;
    m.kept = ex.kept;
    m.change_fraction =
        ex.s_ai.tokens.empty() ? 0.0 : salt::ChangeFraction(*ex.masks, salt::MaskSide::kAi);
    out += salt::ToJsonLine(m) + "\n";
  }
  Emit(f.out, out);
  std::cerr << "kept " << loaded.kept << " discarded " << loaded.discarded << "\n";
  return 0;
}

int RunMix(const CommonFlags& f) {
  const auto cfg = LoadConfig(f);
  const auto unseen_records = RequireRecords(f.data, "--data");
  const auto seen_records = RequireRecords(f.seen_pool, "--seen-pool");
  const salt::IngestOptions ingest = salt::IngestOptionsFrom(cfg);
  salt::Vocab vocab;
  auto unseen = salt::LoadDataset(unseen_records, vocab, true, ingest).examples;
  auto seen = salt::LoadDataset(seen_records, vocab, true, ingest).examples;
  // Ids are made unique per side so the stream maps back to records.
  std::map<std::string, const salt::DatasetRecord*> by_key;
  for (std::size_t i = 0; i < unseen.size(); ++i) {
    unseen[i].id = "u#" + std::to_string(i);
    by_key[unseen[i].id] = &unseen_records[i];
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    seen[i].origin = salt::Origin::kSeen;
    seen[i].id = "s#" + std::to_string(i);
    by_key[seen[i].id] = &seen_records[i];
  }
  const salt::ReplayConfig replay{cfg.replay_ratio.first, cfg.replay_ratio.second,
                                  cfg.seed};
  const auto stream = salt::MixReplay(unseen, seen, replay);
  std::string out;
  std::size_t seen_count = 0;
  for (const auto& ex : stream) {
    salt::DatasetRecord r = *by_key.at(ex.id);
    if (ex.origin == salt::Origin::kSeen) {
      r.origin = salt::Origin::kSeen;
      ++seen_count;
    }
    out += salt::ToJsonLine(r) + "\n";
  }
  Emit(f.out, out);
  std::cerr << "stream " << stream.size() << " seen " << seen_count << "\n";
  return 0;
}

int RunGenSynth(const CommonFlags& f, const salt::SyntheticOptions& base) {
  if (f.out.empty()) throw salt::InvalidArgument("missing required flag --out");
  salt::SyntheticOptions options = base;
  if (f.seed) options.seed = *f.seed;
  const auto corpus = salt::GenSynthetic(options);
  salt::WriteSyntheticCorpus(corpus, f.out);
  return 0;
}

struct TrainFlags {
  std::string init;
  std::string vocab;
};

int RunTrain(const CommonFlags& f, const TrainFlags& t) {
  if (f.out.empty()) throw salt::InvalidArgument("missing required flag --out");
  const auto cfg = LoadConfig(f);
  const auto records = RequireRecords(f.data, "--data");
  const bool replay = !salt::IsDpo(cfg.variant) &&
                      salt::ReplayPart(cfg.variant) != salt::ReplayVariant::kNone;
  std::vector<salt::DatasetRecord> pool_records;
  if (replay) pool_records = RequireRecords(f.seen_pool, "--seen-pool");
  if (salt::IsDpo(cfg.variant) && t.init.empty()) {
    throw salt::InvalidArgument("dpo needs --init as the frozen reference");
  }

  salt::Vocab vocab;
  std::optional<salt::TinyLmParams> init;
  std::int64_t start_step = 0;
  bool grow = false;
  if (!t.init.empty()) {
    auto ckpt = salt::LoadCheckpoint(t.init);
    vocab = salt::Vocab::FromSurfaces(ckpt.vocab);
    init = std::move(ckpt.params);
    start_step = ckpt.step;
  } else if (!t.vocab.empty()) {
    vocab = LoadVocabFile(t.vocab);
  } else {
    grow = true;
  }
  const salt::IngestOptions ingest = salt::IngestOptionsFrom(cfg);
  salt::TrainingData data;
  const auto unseen = salt::LoadDataset(records, vocab, grow, ingest);
  data.unseen = unseen.examples;
  std::size_t pool_kept = 0;
  if (replay) {
    auto pool = salt::LoadDataset(pool_records, vocab, grow, ingest);
    pool_kept = pool.kept;
    data.seen_pool = std::move(pool.examples);
  }
  vocab.Freeze();
  if (!init) init = salt::TinyLmParams::Zeros(vocab.size());

  const auto result = salt::RunTraining(cfg, data, *init, vocab);

  fs::create_directories(f.out);
  std::string log;
  for (const auto& rec : result.log) log += salt::ToJsonLine(rec) + "\n";
  Emit((fs::path(f.out) / "loss.jsonl").string(), log);
  salt::Checkpoint ckpt;
  ckpt.params = result.params;
  ckpt.vocab = vocab.surfaces();
  ckpt.vocab_hash = vocab.Hash();
  ckpt.step = start_step + cfg.steps;
  salt::SaveCheckpoint(ckpt, fs::path(f.out) / "checkpoint.json");

  nlohmann::ordered_json run;
  run["config"] = nlohmann::ordered_json::parse(salt::ToJson(cfg));
  run["init"] = t.init.empty() ? nlohmann::ordered_json(nullptr)
                               : nlohmann::ordered_json(t.init);
  run["vocab_size"] = vocab.size();
  run["train_kept"] = unseen.kept;
  run["train_discarded"] = unseen.discarded;
  if (replay) {
    run["replay_source"] = "mixing_time_checkpoint";
    run["seen_pool_kept_at_load"] = pool_kept;
    run["replayed"] = result.replayed;
  }
  run["final_loss"] = result.log.empty() ? 0.0 : result.log.back().total;
  Emit((fs::path(f.out) / "run.json").string(), run.dump(2) + "\n");
  return 0;
}

struct EvalFlags {
  std::string checkpoint;
  std::string reference;
  std::string lexicon;
  std::string stopwords;
  bool token_mode = false;
};

salt::EvalOptions MakeEvalOptions(const salt::ExperimentConfig& cfg,
                                  const EvalFlags& e) {
  salt::EvalOptions options;
  options.decode = cfg.decode;
  options.dpo = cfg.dpo;
  if (!e.lexicon.empty()) options.lexicon = salt::LoadConceptLexicon(e.lexicon);
  if (!e.stopwords.empty()) options.stopwords = salt::LoadStopwords(e.stopwords);
  if (e.token_mode) options.count_mode = salt::SageCountMode::kTokens;
  return options;
}

std::optional<salt::SageCorpus> LoadBaseline(const CommonFlags& f) {
  if (f.baseline_report.empty()) return std::nullopt;
  return salt::ParseSageCorpus(ReadFile(f.baseline_report));
}

int RunEvalCommand(const CommonFlags& f, const EvalFlags& e) {
  if (e.checkpoint.empty()) {
    throw salt::InvalidArgument("missing required flag --checkpoint");
  }
  const auto cfg = LoadConfig(f);
  const auto records = RequireRecords(f.data, "--data");
  const auto ckpt = salt::LoadCheckpoint(e.checkpoint);
  salt::Vocab vocab = salt::Vocab::FromSurfaces(ckpt.vocab);
  vocab.Freeze();
  salt::EvalOptions options = MakeEvalOptions(cfg, e);
  if (!e.reference.empty()) {
    options.reference = salt::LoadCheckpoint(e.reference, vocab).params;
  }
  const auto data = salt::LoadDataset(records, vocab, false, salt::IngestOptionsFrom(cfg));
  const auto baseline = LoadBaseline(f);
  const auto report = salt::RunEval(ckpt.params, data.examples, options,
                                    std::string(salt::ToString(cfg.variant)),
                                    baseline ? &*baseline : nullptr);
  Emit(f.out, salt::ToJson(report) + "\n");
  return 0;
}

// Lines of {"id", "new", "ai_summary", "edit_summary"}.
int RunSage(const CommonFlags& f, const EvalFlags& e) {
  if (f.data.empty()) throw salt::InvalidArgument("missing required flag --data");
  const auto cfg = LoadConfig(f);
  const salt::EvalOptions options = MakeEvalOptions(cfg, e);
  std::ifstream in(f.data);
  if (!in) throw DataError("cannot open " + f.data);
  salt::Vocab vocab;
  std::vector<salt::SageReport> reports;
  nlohmann::ordered_json per_example = nlohmann::ordered_json::array();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(f.data + ": line " + std::to_string(line_no) +
                      ": malformed record: " + ex.what());
    }
    auto field = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_string()) {
        throw DataError(f.data + ": line " + std::to_string(line_no) +
                        ": missing string field '" + key + "'");
      }
      return j[key].get<std::string>();
    };
    const auto s_new = salt::Tokenize(field("new"), vocab, true, salt::SourceRole::kGenerated);
    const auto s_ai =
        salt::Tokenize(field("ai_summary"), vocab, true, salt::SourceRole::kAiSummary);
    const auto s_edit =
        salt::Tokenize(field("edit_summary"), vocab, true, salt::SourceRole::kEditSummary);
    salt::SageReport r;
    r.word = salt::SageWord(s_new, s_ai, s_edit, options.stopwords, options.count_mode);
    r.concept_level = salt::SageConcept(s_new, s_ai, s_edit, options.lexicon);
    reports.push_back(r);
    per_example.push_back({{"id", j.value("id", std::to_string(line_no))},
                           {"word", {r.word.g1, r.word.g2, r.word.g3}},
                           {"concept",
                            {r.concept_level.g1, r.concept_level.g2, r.concept_level.g3}}});
  }
  const auto corpus = salt::AggregateSage(reports, options.aggregation);
  salt::EvalReport report;
  report.variant = "sage";
  report.sage = corpus;
  const auto baseline = LoadBaseline(f);
  if (baseline) report.ratios = salt::SageRatioReport(corpus, *baseline);
  auto j = nlohmann::ordered_json::parse(salt::ToJson(report));
  j.erase("rouge1");
  j.erase("rouge2");
  j.erase("rougeL");
  j["per_example"] = per_example;
  Emit(f.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SALT: sequence-alignment (un)likelihood training toolkit"};
  app.require_subcommand(1);
  CommonFlags common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Experiment config (JSON)");
    sub->add_option("--data", common.data, "Dataset (JSONL)");
    sub->add_option("--seen-pool", common.seen_pool, "Seen-data pool for replay (JSONL)");
    sub->add_option("--out", common.out, "Output file or directory");
    sub->add_option("--seed", common.seed, "Override the seed");
    sub->add_option("--baseline-report", common.baseline_report,
                    "Metric report of the baseline, for SAGE ratios");
  };

  auto* align = app.add_subcommand("align", "Align AI summaries against edits");
  auto* mask = app.add_subcommand("mask", "Derive changed/unchanged masks");
  auto* mix = app.add_subcommand("mix", "Mix replay data into an edit dataset");
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic edit corpus");
  auto* train = app.add_subcommand("train", "Train a variant");
  auto* eval = app.add_subcommand("eval", "Decode and score a checkpoint");
  auto* sage = app.add_subcommand("sage", "SAGE counts for given outputs");
  for (auto* sub : {align, mask, mix, gen, train, eval, sage}) add_common(sub);

  salt::SyntheticOptions synth;
  gen->add_option("--size", synth.size, "Unseen (human-edit) records");
  gen->add_option("--seen-size", synth.seen_size, "Seen (imitation) records");
  gen->add_option("--vocab-size", synth.vocab_size, "Content-word budget");
  gen->add_option("--error-rate", synth.error_rate, "Corruption probability per fact");

  TrainFlags train_flags;
  train->add_option("--init", train_flags.init,
                    "Starting checkpoint; also the DPO reference");
  train->add_option("--vocab", train_flags.vocab,
                    "Vocabulary file, one surface per line");

  EvalFlags eval_flags;
  eval->add_option("--checkpoint", eval_flags.checkpoint, "Checkpoint to evaluate");
  eval->add_option("--reference", eval_flags.reference,
                   "Reference checkpoint for reward accuracy");
  for (auto* sub : {eval, sage}) {
    sub->add_option("--lexicon", eval_flags.lexicon, "Concept lexicon (phrase<TAB>id)");
    sub->add_option("--stopwords", eval_flags.stopwords, "Stopword file");
    sub->add_flag("--token-counts", eval_flags.token_mode,
                  "Count SAGE tokens instead of distinct types");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*align) return RunAlign(common);
    if (*mask) return RunMask(common);
    if (*mix) return RunMix(common);
    if (*gen) return RunGenSynth(common, synth);
    if (*train) return RunTrain(common, train_flags);
    if (*eval) return RunEvalCommand(common, eval_flags);
    if (*sage) return RunSage(common, eval_flags);
  } catch (const salt::Error& e) {
    std::cerr << "salt: " << e.what() << "\n";
    switch (e.kind()) {
      case salt::ErrorKind::kInvalidArgument: return kExitUsage;
      case salt::ErrorKind::kData: return kExitData;
      case salt::ErrorKind::kDivergence: return kExitDivergence;
    }
  } catch (const std::exception& e) {
    std::cerr << "salt: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
