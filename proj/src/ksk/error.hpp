// Copyright 2026 The ksk Authors
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

#ifndef KSK_ERROR_HPP_
#define KSK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ksk {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kIo = 3,
  kRankDeficient = 4,
  kNoConvergence = 5,
  kInternal = 6,
};

// All failures in the core library are reported by throwing Error. The C API
// translates the code into a ksk_status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by iterative routines that ran out of iterations. Carries the last
// estimate so callers can still decide what to do with it.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_estimate)
      : Error(ErrorCode::kNoConvergence, what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) Fail(code, what);
}

}  // namespace ksk

#endif  // KSK_ERROR_HPP_
