// Copyright 2026 The fairkm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRKM_ERROR_H_
#define FAIRKM_ERROR_H_

#include <stdexcept>
#include <string>

namespace fairkm {

// Failure categories. The CLI maps each one onto a distinct exit code.
enum class ErrorKind {
  kConfig,     // bad parameters or configuration
  kData,       // unreadable or malformed input data
  kGuard,      // request refused by an enumeration / size guard
  kInvariant,  // internal consistency check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ConfigError(const std::string& what) {
  return Error(ErrorKind::kConfig, what);
}
inline Error DataError(const std::string& what) {
  return Error(ErrorKind::kData, what);
}
inline Error GuardError(const std::string& what) {
  return Error(ErrorKind::kGuard, what);
}
inline Error InvariantError(const std::string& what) {
  return Error(ErrorKind::kInvariant, what);
}

}  // namespace fairkm

#endif  // FAIRKM_ERROR_H_
