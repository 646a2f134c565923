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

#ifndef SALT_ERROR_H_
#define SALT_ERROR_H_

#include <stdexcept>
#include <string>

namespace salt {

// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
  kInvalidArgument,  // caller violated a precondition
  kData,             // malformed or inconsistent input data
  kDivergence,       // non-finite values during optimization
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error InvalidArgument(const std::string& message) {
  return Error(ErrorKind::kInvalidArgument, message);
}
inline Error DataError(const std::string& message) {
  return Error(ErrorKind::kData, message);
}
inline Error Diverged(const std::string& message) {
  return Error(ErrorKind::kDivergence, message);
}

}  // namespace salt

#endif  // SALT_ERROR_H_
