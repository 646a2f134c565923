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

#ifndef SALT_ALIGN_H_
#define SALT_ALIGN_H_

#include <optional>
#include <string>
#include <vector>

#include "salt/textproc.h"

namespace salt {

enum class OpKind : char {
  kCorrespond = 'C',
  kSubstitute = 'S',
  kInsert = 'I',  // token only in the edited summary
  kDelete = 'D',  // token only in the AI summary
};

struct AlignOp {
  OpKind kind;
  std::optional<std::size_t> ai_index;
  std::optional<std::size_t> edit_index;

  friend bool operator==(const AlignOp&, const AlignOp&) = default;
};

struct Alignment {
  std::vector<AlignOp> ops;
  int score = 0;

  // One character per op, e.g. "CIIISDCD".
  std::string OpString() const;
};

// Global alignment scores. `near_match` applies to distinct tokens where
// one surface (at least three characters) is a prefix of the other, such as
// "take" / "takes"; the op is still a substitution. Setting it equal to
// `mismatch` gives plain exact-match scoring.
struct NwScoring {
  int match = 2;
  int mismatch = -2;
  int gap = -2;
  int near_match = 1;

  void Validate() const;
  int Substitution(const Token& ai, const Token& edit) const;
};

using BitMask = std::vector<bool>;

// Indicator vectors over both sides. For imitation data the edit side plays
// the role of the imitation summary.
struct EditMasks {
  BitMask ai_changed;
  BitMask ai_unchanged;
  BitMask e_changed;
  BitMask e_unchanged;

  std::size_t ai_size() const { return ai_changed.size(); }
  std::size_t edit_size() const { return e_changed.size(); }
  // Complement invariant on both sides.
  bool Consistent() const;
};

enum class MaskSide { kAi, kEdit };

inline constexpr double kDefaultDiscardThreshold = 0.60;

// Maximum-score global alignment. Among optimal alignments the one with the
// most correspondences, then the most substitutions, is chosen; remaining
// ties go diagonal, then delete, then insert during traceback.
Alignment AlignNw(const TokenSeq& ai, const TokenSeq& edit,
                  const NwScoring& scoring = {});

// Sum of per-op contributions; equals Alignment::score for AlignNw output.
int ScoreOps(const Alignment& alignment, const TokenSeq& ai,
             const TokenSeq& edit, const NwScoring& scoring);

EditMasks DeriveMasks(const Alignment& alignment);

// Flips isolated single changed AI positions back to unchanged.
EditMasks SmoothAiMask(const EditMasks& masks);

double ChangeFraction(const EditMasks& masks, MaskSide side);

// False (discard) iff the changed share of the AI side strictly exceeds
// `threshold`.
bool FilterByChangeRatio(const EditMasks& masks,
                         double threshold = kDefaultDiscardThreshold);

EditMasks AllUnchanged(std::size_t ai_size, std::size_t edit_size);

// Line-delimited JSON mask export record.
struct MaskRecord {
  std::string id;
  std::vector<std::string> ai_tokens;
  std::vector<std::string> edit_tokens;
  std::string ops;
  BitMask ai_changed;
  BitMask e_changed;
  bool kept = true;
  double change_fraction = 0.0;
};

std::string ToJsonLine(const MaskRecord& record);

}  // namespace salt

#endif  // SALT_ALIGN_H_
