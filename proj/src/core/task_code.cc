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

#include "sconn/core/task_code.h"

#include <cmath>

#include "sconn/core/error.h"

namespace sconn {
namespace {

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorCode::kInvalidDefinition, message);
}

std::string MetricName(const Json& spec, const char* fallback) {
  if (!spec.contains("metric")) return fallback;
  if (!spec["metric"].is_string() || spec["metric"].get<std::string>().empty()) {
    Bad("metric must be a non-empty string");
  }
  return spec["metric"].get<std::string>();
}

Operand ParseOperand(const Json& spec, const char* key) {
  if (!spec.contains(key)) Bad(std::string("missing operand '") + key + "'");
  const Json& v = spec[key];
  if (v.is_number()) {
    double d = v.get<double>();
    if (!std::isfinite(d)) Bad(std::string("operand '") + key + "' is not finite");
    return d;
  }
  if (v.is_string() && !v.get<std::string>().empty()) return v.get<std::string>();
  Bad(std::string("operand '") + key + "' must be a number or a field name");
}

ContractionSpec ParseContraction(const Json& spec) {
  ContractionSpec out;
  if (spec.contains("x0")) {
    if (!spec["x0"].is_number()) Bad("x0 must be a number");
    out.x0 = spec["x0"].get<double>();
    if (!std::isfinite(*out.x0)) Bad("x0 is not finite");
  }
  if (spec.contains("x0_input")) {
    if (!spec["x0_input"].is_string() || spec["x0_input"].get<std::string>().empty()) {
      Bad("x0_input must name an input field");
    }
    out.x0_input = spec["x0_input"].get<std::string>();
  }
  if (!out.x0 && !out.x0_input) Bad("contraction needs x0 or x0_input");
  if (spec.contains("factor")) {
    if (!spec["factor"].is_number()) Bad("factor must be a number");
    out.factor = spec["factor"].get<double>();
  }
  if (!std::isfinite(out.factor)) Bad("factor is not finite");
  out.metric = MetricName(spec, "x");
  return out;
}

ArithmeticSpec ParseArithmetic(const Json& spec) {
  ArithmeticSpec out;
  if (!spec.contains("op") || !spec["op"].is_string()) Bad("arithmetic needs op");
  const auto op = spec["op"].get<std::string>();
  if (op == "add") {
    out.op = ArithmeticOp::kAdd;
  } else if (op == "sub") {
    out.op = ArithmeticOp::kSub;
  } else if (op == "mul") {
    out.op = ArithmeticOp::kMul;
  } else if (op == "div") {
    out.op = ArithmeticOp::kDiv;
  } else {
    Bad("unknown arithmetic op '" + op + "'");
  }
  out.lhs = ParseOperand(spec, "lhs");
  out.rhs = ParseOperand(spec, "rhs");
  out.metric = MetricName(spec, "value");
  return out;
}

CommandSpec ParseCommand(const Json& spec) {
  if (!spec.contains("command") || !spec["command"].is_string() ||
      spec["command"].get<std::string>().empty()) {
    Bad("external command needs a non-empty command template");
  }
  return CommandSpec{spec["command"].get<std::string>()};
}

}  // namespace

TaskCodeSpec ParseTaskCode(const TaskCodeRef& ref) {
  if (!ref.spec.is_object()) Bad("task code spec must be an object");
  switch (ref.kind) {
    case TaskCodeKind::kBuiltinContraction: return ParseContraction(ref.spec);
    case TaskCodeKind::kBuiltinArithmetic: return ParseArithmetic(ref.spec);
    case TaskCodeKind::kExternalCommand: return ParseCommand(ref.spec);
  }
  Bad("unknown task code kind");
}

std::vector<std::string> TaskCodeViolations(const TaskCodeRef& ref) {
  try {
    ParseTaskCode(ref);
  } catch (const Error& e) {
    return {e.what()};
  }
  return {};
}

}  // namespace sconn
