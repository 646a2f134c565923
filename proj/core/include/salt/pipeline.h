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

#ifndef SALT_PIPELINE_H_
#define SALT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "salt/align.h"
#include "salt/example.h"
#include "salt/loss.h"
#include "salt/metrics.h"
#include "salt/model.h"
#include "salt/textproc.h"

namespace salt {

enum class Variant {
  kSaltL,
  kSaltLd,
  kSaltLi,
  kSaltU,
  kSaltLU,
  kSaltLRsaltL,
  kSaltLURsaltL,
  kSaltLRsaltLU,
  kSaltLURsaltLU,
  kDpo,
};

std::string_view ToString(Variant v);
Variant ParseVariant(std::string_view name);
std::span<const Variant> AllVariants();

bool IsDpo(Variant v);
// SALT part of a (non-DPO) variant.
SaltVariant SaltPart(Variant v);
ReplayVariant ReplayPart(Variant v);

struct ReplayConfig {
  // unseen : seen. (2, 1) samples half as many seen examples as unseen.
  int unseen = 2;
  int seen = 1;
  std::uint64_t seed = 0;

  void Validate() const;
  std::size_t SeenCount(std::size_t unseen_count) const;
};

struct ExperimentConfig {
  Variant variant = Variant::kSaltL;
  // Unset means the variant's preset.
  std::optional<LossWeights> weights;
  EditSideForm edit_form = EditSideForm::kLikelihood;
  DpoConfig dpo;
  int steps = 100;
  int batch_size = 8;
  double lr = 0.05;
  std::uint64_t seed = 0;
  DecodeConfig decode;
  // Smoothing and the discard filter on imitation (seen) data.
  bool smoothing = true;
  double discard_threshold = kDefaultDiscardThreshold;
  // Also smooth and filter human-edit (unseen) data.
  bool filter_human_edits = false;
  std::pair<int, int> replay_ratio{2, 1};

  void Validate() const;
  LossWeights EffectiveWeights() const;
};

// Rejects unknown keys at every level.
ExperimentConfig ParseExperimentConfig(const std::string& json_text);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
std::string ToJson(const ExperimentConfig& cfg);

// Line-delimited dataset record.
struct DatasetRecord {
  std::string id;
  std::string input;
  std::string ai_summary;
  std::string edit_summary;
  Origin origin = Origin::kUnseen;
};

std::vector<DatasetRecord> ReadDatasetRecords(const std::filesystem::path& path);
DatasetRecord ParseDatasetRecord(const std::string& line, int line_no);
std::string ToJsonLine(const DatasetRecord& record);
void WriteDatasetRecords(std::span<const DatasetRecord> records,
                         const std::filesystem::path& path);

struct IngestOptions {
  NwScoring scoring;
  bool smoothing = true;
  double discard_threshold = kDefaultDiscardThreshold;
  bool filter_human_edits = false;
};

IngestOptions IngestOptionsFrom(const ExperimentConfig& cfg);

// Aligns S_AI against the edit, derives masks and, on the imitation path,
// smooths and applies the discard filter.
TrainingExample PrepareExample(const DatasetRecord& record, Vocab& vocab,
                               bool grow, const IngestOptions& options);
void RecomputeMasks(TrainingExample& example, const IngestOptions& options);

struct LoadedDataset {
  std::vector<TrainingExample> examples;  // kept and discarded
  std::size_t kept = 0;
  std::size_t discarded = 0;

  std::vector<const TrainingExample*> Kept() const;
};

LoadedDataset LoadDataset(std::span<const DatasetRecord> records, Vocab& vocab,
                          bool grow, const IngestOptions& options);
LoadedDataset LoadDataset(const std::filesystem::path& path, Vocab& vocab,
                          bool grow, const IngestOptions& options);

// Samples floor(n * seen / unseen) kept seen examples without replacement,
// n being the number of kept unseen examples, and shuffles both together.
std::vector<TrainingExample> MixReplay(std::span<const TrainingExample> unseen,
                                       std::span<const TrainingExample> seen_pool,
                                       const ReplayConfig& cfg);

struct SyntheticOptions {
  std::uint64_t seed = 0;
  std::size_t size = 100;        // unseen (human-edit) records
  std::size_t seen_size = 0;     // seen (imitation) records
  std::size_t vocab_size = 120;  // approximate content-word budget
  double error_rate = 0.3;
};

struct SyntheticRecord {
  DatasetRecord record;
  // Positions in the AI summary that were corrupted.
  std::vector<std::size_t> error_positions;
  bool substitution_only = true;
};

struct SyntheticCorpus {
  std::vector<SyntheticRecord> unseen;
  std::vector<SyntheticRecord> seen;
  ConceptLexicon lexicon;
  // Words of the AI-side style that edits remove or replace.
  std::vector<std::string> error_words;
  std::vector<std::string> vocabulary;  // every surface, first-seen order
};

SyntheticCorpus GenSynthetic(const SyntheticOptions& options);
// Writes unseen.jsonl, seen.jsonl, lexicon.tsv, vocab.txt and truth.jsonl.
void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const std::filesystem::path& dir);

struct LossRecord {
  int step = 0;
  std::string variant;
  double total = 0.0;
  double ai_side = 0.0;
  double edit_side = 0.0;
  std::optional<std::pair<double, double>> dpo;  // loss, reward accuracy
};

std::string ToJsonLine(const LossRecord& record);

struct TrainingData {
  std::vector<TrainingExample> unseen;
  std::vector<TrainingExample> seen_pool;
};

struct TrainResult {
  TinyLmParams params;
  std::vector<LossRecord> log;
  std::size_t replayed = 0;  // seen examples used after regeneration
  // Ids of examples that reached at least one objective.
  std::vector<std::string> trained_ids;
};

// Starts from `init` (also the DPO reference). For replay variants the seen
// AI summaries are regenerated by decoding `init` once, before training.
TrainResult RunTraining(const ExperimentConfig& cfg, const TrainingData& data,
                        const TinyLmParams& init, const Vocab& vocab);

struct EvalOptions {
  DecodeConfig decode;
  StopwordSet stopwords = DefaultStopwords();
  ConceptLexicon lexicon;
  SageCountMode count_mode = SageCountMode::kTypes;
  SageAggregation aggregation = SageAggregation::kSum;
  // Reward accuracy is reported when a reference model is given.
  std::optional<TinyLmParams> reference;
  DpoConfig dpo;
};

struct EvalReport {
  std::string variant;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  SageCorpus sage;
  std::optional<SageRatios> ratios;
  std::optional<double> reward_accuracy;
  std::vector<std::vector<TokenId>> outputs;
};

EvalReport RunEval(const TinyLmParams& params,
                   std::span<const TrainingExample> eval_set,
                   const EvalOptions& options, const std::string& variant,
                   const SageCorpus* baseline = nullptr);

std::string ToJson(const EvalReport& report);
// Reads the corpus SAGE counts back from a metric report.
SageCorpus ParseSageCorpus(const std::string& report_json);

}  // namespace salt

#endif  // SALT_PIPELINE_H_
