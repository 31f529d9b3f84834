// Copyright 2026 The sconn Authors
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

#ifndef SCONN_CORE_ERROR_H_
#define SCONN_CORE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sconn {

enum class ErrorCode {
  kInvalidArgument,
  kContractViolation,
  kParse,
  kIo,
  kTimeRegression,
  kAppendAfterTerminal,
  kInvalidDefinition,
  kUnknownVm,
  kUnsatisfiableConstraint,
  kMissingMetric,
  kStepOnCompleted,
  kUnknownJob,
  kCorruptRecord,
  kDuplicateDataset,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures raised by the library carry one of the codes
// above. Expected domain outcomes (failed data checks, insufficient VMs,
// failed transfers) are returned as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sconn

#endif  // SCONN_CORE_ERROR_H_
