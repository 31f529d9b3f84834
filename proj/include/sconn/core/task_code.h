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

#ifndef SCONN_CORE_TASK_CODE_H_
#define SCONN_CORE_TASK_CODE_H_

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sconn/core/types.h"

namespace sconn {

// Typed views of TaskCodeRef::spec.
//
//   builtin_contraction: {"x0": 8} or {"x0_input": "x0"}, "factor", "metric"
//   builtin_arithmetic:  {"op": "add|sub|mul|div", "lhs", "rhs", "metric"}
//                        operands are numbers, input field names, or
//                        "$iteration"
//   external_command:    {"command": "solver --t {T}"}

struct ContractionSpec {
  std::optional<double> x0;
  std::optional<std::string> x0_input;
  double factor = 0.5;
  std::string metric = "x";
};

enum class ArithmeticOp { kAdd, kSub, kMul, kDiv };

using Operand = std::variant<double, std::string>;

struct ArithmeticSpec {
  ArithmeticOp op = ArithmeticOp::kAdd;
  Operand lhs = 0.0;
  Operand rhs = 0.0;
  std::string metric = "value";
};

struct CommandSpec {
  std::string command;
};

using TaskCodeSpec = std::variant<ContractionSpec, ArithmeticSpec, CommandSpec>;

inline constexpr std::string_view kIterationOperand = "$iteration";

// Throws kInvalidDefinition on a malformed spec.
TaskCodeSpec ParseTaskCode(const TaskCodeRef& ref);

// Empty when the spec is valid for its kind.
std::vector<std::string> TaskCodeViolations(const TaskCodeRef& ref);

}  // namespace sconn

#endif  // SCONN_CORE_TASK_CODE_H_
