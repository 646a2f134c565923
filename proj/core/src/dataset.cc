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
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "salt/error.h"
#include "salt/pipeline.h"

namespace salt {
namespace {

using nlohmann::json;

std::string RequireString(const json& j, const char* key, int line_no) {
  if (!j.contains(key)) {
    throw DataError("line " + std::to_string(line_no) + ": missing field '" +
                    key + "'");
  }
  if (!j[key].is_string()) {
    throw DataError("line " + std::to_string(line_no) + ": field '" + key +
                    "' must be a string");
  }
  return j[key].get<std::string>();
}

}  // namespace

DatasetRecord ParseDatasetRecord(const std::string& line, int line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError("line " + std::to_string(line_no) +
                    ": malformed record: " + e.what());
  }
  if (!j.is_object()) {
    throw DataError("line " + std::to_string(line_no) +
                    ": record must be a JSON object");
  }
  DatasetRecord r;
  r.id = RequireString(j, "id", line_no);
  r.input = RequireString(j, "input", line_no);
  r.ai_summary = RequireString(j, "ai_summary", line_no);
  r.edit_summary = RequireString(j, "edit_summary", line_no);
  const std::string origin = RequireString(j, "origin", line_no);
  if (origin == "seen") {
    r.origin = Origin::kSeen;
  } else if (origin == "unseen") {
    r.origin = Origin::kUnseen;
  } else {
    throw DataError("line " + std::to_string(line_no) +
                    ": origin must be \"seen\" or \"unseen\"");
  }
  return r;
}

std::vector<DatasetRecord> ReadDatasetRecords(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  std::vector<DatasetRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseDatasetRecord(line, line_no));
    } catch (const Error& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

std::string ToJsonLine(const DatasetRecord& record) {
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["input"] = record.input;
  j["ai_summary"] = record.ai_summary;
  j["edit_summary"] = record.edit_summary;
  j["origin"] = record.origin == Origin::kSeen ? "seen" : "unseen";
  return j.dump();
}

void WriteDatasetRecords(std::span<const DatasetRecord> records,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : records) out << ToJsonLine(r) << '\n';
}

IngestOptions IngestOptionsFrom(const ExperimentConfig& cfg) {
  IngestOptions o;
  o.smoothing = cfg.smoothing;
  o.discard_threshold = cfg.discard_threshold;
  o.filter_human_edits = cfg.filter_human_edits;
  return o;
}

void RecomputeMasks(TrainingExample& example, const IngestOptions& options) {
  EditMasks masks = DeriveMasks(AlignNw(example.s_ai, example.s_edit, options.scoring));
  const bool imitation = example.origin == Origin::kSeen;
  example.kept = true;
  if (imitation || options.filter_human_edits) {
    if (options.smoothing) masks = SmoothAiMask(masks);
    example.kept = FilterByChangeRatio(masks, options.discard_threshold);
  }
  example.masks = std::move(masks);
}

TrainingExample PrepareExample(const DatasetRecord& record, Vocab& vocab,
                               bool grow, const IngestOptions& options) {
  TrainingExample ex;
  ex.id = record.id;
  ex.origin = record.origin;
  ex.input = Tokenize(record.input, vocab, grow, SourceRole::kInput);
  ex.s_ai = Tokenize(record.ai_summary, vocab, grow, SourceRole::kAiSummary);
  ex.s_edit = Tokenize(record.edit_summary, vocab, grow,
                       record.origin == Origin::kSeen
                           ? SourceRole::kImitationSummary
                           : SourceRole::kEditSummary);
  RecomputeMasks(ex, options);
  return ex;
}

std::vector<const TrainingExample*> LoadedDataset::Kept() const {
  std::vector<const TrainingExample*> out;
  for (const auto& e : examples) {
    if (e.kept) out.push_back(&e);
  }
  return out;
}

LoadedDataset LoadDataset(std::span<const DatasetRecord> records, Vocab& vocab,
                          bool grow, const IngestOptions& options) {
  LoadedDataset out;
  out.examples.reserve(records.size());
  for (const auto& r : records) {
    out.examples.push_back(PrepareExample(r, vocab, grow, options));
    (out.examples.back().kept ? out.kept : out.discarded) += 1;
  }
  return out;
}

LoadedDataset LoadDataset(const std::filesystem::path& path, Vocab& vocab,
                          bool grow, const IngestOptions& options) {
  const auto records = ReadDatasetRecords(path);
  return LoadDataset(records, vocab, grow, options);
}

std::vector<TrainingExample> MixReplay(std::span<const TrainingExample> unseen,
                                       std::span<const TrainingExample> seen_pool,
                                       const ReplayConfig& cfg) {
  cfg.Validate();
  std::vector<TrainingExample> stream;
  for (const auto& e : unseen) {
    if (e.kept) stream.push_back(e);
  }
  std::vector<const TrainingExample*> pool;
  for (const auto& e : seen_pool) {
    if (e.kept) pool.push_back(&e);
  }
  const std::size_t need = cfg.SeenCount(stream.size());
  if (pool.size() < need) {
    throw DataError("seen pool has " + std::to_string(pool.size()) +
                    " kept examples, replay needs " + std::to_string(need));
  }
  std::mt19937_64 rng(cfg.seed);
  // Partial Fisher-Yates: the first `need` slots are a uniform sample.
  for (std::size_t i = 0; i < need; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  for (std::size_t i = 0; i < need; ++i) stream.push_back(*pool[i]);
  std::shuffle(stream.begin(), stream.end(), rng);
  return stream;
}

}  // namespace salt
