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

#include "sconn/exec/task_code_eval.h"

#include <cmath>

#include "sconn/core/error.h"
#include "sconn/core/task_code.h"

namespace sconn {
namespace {

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

double NumericInput(const ScalarMap& inputs, const std::string& name) {
  auto it = inputs.find(name);
  if (it == inputs.end()) Fail("input '" + name + "' is missing");
  auto value = AsNumber(it->second);
  if (!value) Fail("input '" + name + "' is not numeric");
  return *value;
}

double Resolve(const Operand& operand, const ScalarMap& inputs, int iteration) {
  if (const auto* d = std::get_if<double>(&operand)) return *d;
  const auto& name = std::get<std::string>(operand);
  if (name == kIterationOperand) return iteration;
  return NumericInput(inputs, name);
}

Json Contract(const ContractionSpec& spec, const ScalarMap& inputs, int iteration) {
  double x = spec.x0_input ? NumericInput(inputs, *spec.x0_input) : *spec.x0;
  for (int i = 0; i < iteration; ++i) x *= spec.factor;
  return Json{{"metrics", {{spec.metric, x}}}, {"value", x}};
}

Json Arithmetic(const ArithmeticSpec& spec, const ScalarMap& inputs, int iteration) {
  const double lhs = Resolve(spec.lhs, inputs, iteration);
  const double rhs = Resolve(spec.rhs, inputs, iteration);
  double v = 0.0;
  switch (spec.op) {
    case ArithmeticOp::kAdd: v = lhs + rhs; break;
    case ArithmeticOp::kSub: v = lhs - rhs; break;
    case ArithmeticOp::kMul: v = lhs * rhs; break;
    case ArithmeticOp::kDiv:
      if (rhs == 0.0) Fail("division by zero");
      v = lhs / rhs;
      break;
  }
  return Json{{"metrics", {{spec.metric, v}}}, {"value", v}};
}

Json Command(const CommandSpec& spec, const ScalarMap& inputs, int iteration) {
  std::string out;
  const std::string& t = spec.command;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != '{') {
      out += t[i];
      continue;
    }
    auto close = t.find('}', i);
    if (close == std::string::npos) Fail("unterminated placeholder in command template");
    const std::string name = t.substr(i + 1, close - i - 1);
    if (name == "iteration") {
      out += std::to_string(iteration);
    } else {
      auto it = inputs.find(name);
      if (it == inputs.end()) Fail("command placeholder '" + name + "' has no input");
      out += ScalarToString(it->second);
    }
    i = close;
  }
  return Json{{"metrics", Json::object()}, {"command", out}};
}

}  // namespace

Json EvaluateTaskCode(const TaskCodeRef& code, const ScalarMap& inputs, int iteration) {
  const TaskCodeSpec spec = ParseTaskCode(code);
  return std::visit(
      [&](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ContractionSpec>) {
          return Contract(s, inputs, iteration);
        } else if constexpr (std::is_same_v<T, ArithmeticSpec>) {
          return Arithmetic(s, inputs, iteration);
        } else {
          return Command(s, inputs, iteration);
        }
      },
      spec);
}

}  // namespace sconn
