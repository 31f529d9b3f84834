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

#include "sconn/core/definition.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "sconn/core/error.h"
#include "sconn/core/task_code.h"

namespace sconn {
namespace {

void CheckConstraints(const DataConstraints& c, std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < c.syntactic_rules.size(); ++i) {
    const auto& rule = c.syntactic_rules[i];
    if (rule.name.empty()) {
      out.push_back("syntactic rule " + std::to_string(i) + " names no field");
    } else if (!seen.insert(rule.name).second) {
      out.push_back("syntactic rule for '" + rule.name + "' is duplicated");
    }
  }
  for (std::size_t i = 0; i < c.semantic_rules.size(); ++i) {
    const auto& rule = c.semantic_rules[i];
    const std::string where = "semantic rule " + std::to_string(i);
    if (rule.field.empty()) out.push_back(where + " names no field");
    if (rule.value.has_value() == rule.other_field.has_value()) {
      out.push_back(where + " needs exactly one of value or other_field");
    }
    if (rule.value && !std::isfinite(*rule.value)) out.push_back(where + " bound is not finite");
    if (rule.other_field && rule.other_field->empty()) {
      out.push_back(where + " other_field is empty");
    }
  }
}

void CheckTask(std::size_t index, const ExecParamT& t, std::vector<std::string>& out) {
  const std::string where = "exec_param_t[" + std::to_string(index) + "]";
  if (t.max_iterations < 1) {
    out.push_back(where + ".max_iterations " + std::to_string(t.max_iterations) + " < 1");
  }
  if (t.rerun_limit < 0) {
    out.push_back(where + ".rerun_limit " + std::to_string(t.rerun_limit) + " < 0");
  }
  if (t.convergence) {
    if (t.convergence->metric_name.empty()) out.push_back(where + ".convergence has no metric");
    if (!std::isfinite(t.convergence->threshold)) {
      out.push_back(where + ".convergence threshold is not finite");
    }
  }
  if (t.scheduling_constraints && t.scheduling_constraints->min_processes < 1) {
    out.push_back(where + ".scheduling_constraints.min_processes < 1");
  }
  for (const auto& name : t.required_inputs) {
    if (name.empty()) out.push_back(where + " lists an empty required input");
  }
}

}  // namespace

std::vector<std::string> validate_definition(const SCDefinition& def) {
  std::vector<std::string> out;
  if (def.name.empty()) out.push_back("name is empty");

  CheckConstraints(def.data_constraints, out);

  const auto& vm = def.exec_param_vm;
  if (vm.retry_limit < 0) {
    out.push_back("exec_param_vm.retry_limit " + std::to_string(vm.retry_limit) + " < 0");
  }
  if (vm.bootstrap_step_count < 1) {
    out.push_back("exec_param_vm.bootstrap_step_count " +
                  std::to_string(vm.bootstrap_step_count) + " < 1");
  }

  if (def.exec_param_t.empty()) out.push_back("exec_param_t is empty (NT must be >= 1)");
  if (def.t_code.size() != def.exec_param_t.size()) {
    out.push_back("t_code length " + std::to_string(def.t_code.size()) +
                  " != exec_param_t length " + std::to_string(def.exec_param_t.size()));
  }
  for (std::size_t i = 0; i < def.exec_param_t.size(); ++i) CheckTask(i, def.exec_param_t[i], out);
  for (std::size_t i = 0; i < def.t_code.size(); ++i) {
    for (const auto& v : TaskCodeViolations(def.t_code[i])) {
      out.push_back("t_code[" + std::to_string(i) + "]: " + v);
    }
  }

  for (const auto& [name, values] : def.sweep.variables) {
    if (name.empty()) out.push_back("sweep variable with empty name");
    if (values.empty()) out.push_back("sweep variable '" + name + "' has no values");
    if (std::find(kReservedParameterNames.begin(), kReservedParameterNames.end(), name) !=
        kReservedParameterNames.end()) {
      out.push_back("sweep variable '" + name + "' uses a reserved parameter name");
    }
  }
  return out;
}

Ticks wcet_bound(const SCDefinition& def, const UserReqVM& req, const CostModel& cost) {
  if (auto violations = validate_definition(def); !violations.empty()) {
    throw Error(ErrorCode::kInvalidDefinition, "wcet_bound: " + violations.front());
  }
  Ticks total = cost.data_check;
  total += (1 + static_cast<Ticks>(def.exec_param_vm.retry_limit)) * cost.vm_create_attempt;
  total += cost.bootstrap;
  for (std::size_t k = 0; k < def.exec_param_t.size(); ++k) {
    total += static_cast<Ticks>(def.exec_param_t[k].max_iterations) * cost.TaskIterationCost(k);
  }
  total += cost.transfer;
  total += static_cast<Ticks>(req.ideal) * cost.cleanup_per_vm;
  return total;
}

}  // namespace sconn
