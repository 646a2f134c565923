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

#include "salt/align.h"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

#include "salt/error.h"

namespace salt {
namespace {

// Lexicographic objective: score first, then correspondences, then
// substitutions. Each component is additive along a path.
struct Cell {
  int score = 0;
  int corr = 0;
  int subst = 0;

  Cell Plus(int s, int c, int u) const {
    return {score + s, corr + c, subst + u};
  }
  auto Key() const { return std::tie(score, corr, subst); }
  friend bool operator==(const Cell& a, const Cell& b) {
    return a.Key() == b.Key();
  }
  friend bool operator<(const Cell& a, const Cell& b) {
    return a.Key() < b.Key();
  }
};

}  // namespace

std::string Alignment::OpString() const {
  std::string out;
  out.reserve(ops.size());
  for (const auto& op : ops) out += static_cast<char>(op.kind);
  return out;
}

void NwScoring::Validate() const {
  if (!(match > mismatch)) throw InvalidArgument("NW scoring needs match > mismatch");
  if (!(gap < 0)) throw InvalidArgument("NW scoring needs gap < 0");
  if (!(near_match < match && near_match >= mismatch)) {
    throw InvalidArgument("NW scoring needs mismatch <= near_match < match");
  }
}

int NwScoring::Substitution(const Token& ai, const Token& edit) const {
  if (ai.id == edit.id && ai.surface == edit.surface) return match;
  const auto& a = ai.surface;
  const auto& b = edit.surface;
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  if (shorter.size() >= 3 && longer.size() > shorter.size() &&
      longer.compare(0, shorter.size(), shorter) == 0) {
    return near_match;
  }
  return mismatch;
}

Alignment AlignNw(const TokenSeq& ai, const TokenSeq& edit,
                  const NwScoring& scoring) {
  scoring.Validate();
  const std::size_t n = ai.size();
  const std::size_t m = edit.size();
  const std::size_t width = m + 1;
  std::vector<Cell> dp((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> Cell& {
    return dp[i * width + j];
  };
  auto same = [&](std::size_t i, std::size_t j) {
    return ai[i].id == edit[j].id && ai[i].surface == edit[j].surface;
  };
  auto diag_step = [&](std::size_t i, std::size_t j) {
    const bool c = same(i - 1, j - 1);
    return at(i - 1, j - 1)
        .Plus(scoring.Substitution(ai[i - 1], edit[j - 1]), c ? 1 : 0,
              c ? 0 : 1);
  };

  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = at(i - 1, 0).Plus(scoring.gap, 0, 0);
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = at(0, j - 1).Plus(scoring.gap, 0, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::max({diag_step(i, j), at(i - 1, j).Plus(scoring.gap, 0, 0),
                           at(i, j - 1).Plus(scoring.gap, 0, 0)});
    }
  }

  Alignment out;
  out.score = at(n, m).score;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == diag_step(i, j)) {
      const OpKind kind =
          same(i - 1, j - 1) ? OpKind::kCorrespond : OpKind::kSubstitute;
      out.ops.push_back({kind, i - 1, j - 1});
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j).Plus(scoring.gap, 0, 0)) {
      out.ops.push_back({OpKind::kDelete, i - 1, std::nullopt});
      --i;
    } else {
      out.ops.push_back({OpKind::kInsert, std::nullopt, j - 1});
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

int ScoreOps(const Alignment& alignment, const TokenSeq& ai,
             const TokenSeq& edit, const NwScoring& scoring) {
  int total = 0;
  for (const auto& op : alignment.ops) {
    switch (op.kind) {
      case OpKind::kCorrespond:
      case OpKind::kSubstitute:
        total += scoring.Substitution(ai[*op.ai_index], edit[*op.edit_index]);
        break;
      case OpKind::kInsert:
      case OpKind::kDelete:
        total += scoring.gap;
        break;
    }
  }
  return total;
}

bool EditMasks::Consistent() const {
  if (ai_changed.size() != ai_unchanged.size() ||
      e_changed.size() != e_unchanged.size()) {
    return false;
  }
  for (std::size_t i = 0; i < ai_changed.size(); ++i) {
    if (ai_changed[i] == ai_unchanged[i]) return false;
  }
  for (std::size_t i = 0; i < e_changed.size(); ++i) {
    if (e_changed[i] == e_unchanged[i]) return false;
  }
  return true;
}

EditMasks DeriveMasks(const Alignment& alignment) {
  std::size_t n = 0;
  std::size_t m = 0;
  for (const auto& op : alignment.ops) {
    if (op.ai_index) n = std::max(n, *op.ai_index + 1);
    if (op.edit_index) m = std::max(m, *op.edit_index + 1);
  }
  EditMasks masks;
  masks.ai_changed.assign(n, true);
  masks.e_changed.assign(m, true);
  for (const auto& op : alignment.ops) {
    if (op.kind != OpKind::kCorrespond) continue;
    masks.ai_changed[*op.ai_index] = false;
    masks.e_changed[*op.edit_index] = false;
  }
  masks.ai_unchanged = masks.ai_changed;
  masks.ai_unchanged.flip();
  masks.e_unchanged = masks.e_changed;
  masks.e_unchanged.flip();
  return masks;
}

EditMasks SmoothAiMask(const EditMasks& masks) {
  EditMasks out = masks;
  const auto& changed = masks.ai_changed;
  const std::size_t n = changed.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!changed[i]) continue;
    const bool left = i > 0 && changed[i - 1];
    const bool right = i + 1 < n && changed[i + 1];
    if (!left && !right) {
      out.ai_changed[i] = false;
      out.ai_unchanged[i] = true;
    }
  }
  return out;
}

double ChangeFraction(const EditMasks& masks, MaskSide side) {
  const BitMask& bits = side == MaskSide::kAi ? masks.ai_changed : masks.e_changed;
  if (bits.empty()) throw InvalidArgument("empty sequence has no change fraction");
  const auto changed = std::count(bits.begin(), bits.end(), true);
  return static_cast<double>(changed) / static_cast<double>(bits.size());
}

bool FilterByChangeRatio(const EditMasks& masks, double threshold) {
  const auto& unchanged = masks.ai_unchanged;
  if (unchanged.empty()) return true;
  const auto zeros = std::count(unchanged.begin(), unchanged.end(), false);
  // Strict "more than": exactly threshold is kept.
  return static_cast<double>(zeros) <=
         threshold * static_cast<double>(unchanged.size()) + 1e-12;
}

EditMasks AllUnchanged(std::size_t ai_size, std::size_t edit_size) {
  EditMasks m;
  m.ai_changed.assign(ai_size, false);
  m.ai_unchanged.assign(ai_size, true);
  m.e_changed.assign(edit_size, false);
  m.e_unchanged.assign(edit_size, true);
  return m;
}

std::string ToJsonLine(const MaskRecord& record) {
  auto bits = [](const BitMask& b) {
    std::vector<int> v(b.begin(), b.end());
    return v;
  };
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["ai_tokens"] = record.ai_tokens;
  j["edit_tokens"] = record.edit_tokens;
  j["ops"] = record.ops;
  j["ai_changed"] = bits(record.ai_changed);
  j["e_changed"] = bits(record.e_changed);
  j["kept"] = record.kept;
  j["change_fraction"] = record.change_fraction;
  return j.dump();
}

}  // namespace salt
