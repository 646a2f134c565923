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

#ifndef SALT_EXAMPLE_H_
#define SALT_EXAMPLE_H_

#include <optional>
#include <string>

#include "salt/align.h"
#include "salt/textproc.h"

namespace salt {

// Whether the example comes from data the model was already trained on
// (replayed, with imitation edits) or from new human-edit data.
enum class Origin { kSeen, kUnseen };

struct TrainingExample {
  std::string id;
  TokenSeq input;
  TokenSeq s_ai;
  // Human edit for unseen data, imitation edit (ground truth) for seen data.
  TokenSeq s_edit;
  std::optional<EditMasks> masks;
  Origin origin = Origin::kUnseen;
  bool kept = true;
};

}  // namespace salt

#endif  // SALT_EXAMPLE_H_
