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

#ifndef SCONN_EXEC_EXECUTION_H_
#define SCONN_EXEC_EXECUTION_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sconn/cloud/provider.h"
#include "sconn/core/types.h"

namespace sconn {

enum class ProcessStatus { kPending, kRunning, kDone, kFailedBeyondRecovery, kRerunnable };

std::string_view EnumName(ProcessStatus v);

// One process of one task iteration.
struct ProcessInstance {
  std::string process_id;  // "t<task>.p<n>", stable across iterations
  int task_index = 1;
  int iteration = 1;
  ScalarMap params;
  std::string assigned_vm;
  ProcessStatus status = ProcessStatus::kPending;
  int rerun_count = 0;
  std::optional<OutputRecord> output;  // set iff status == kDone

  bool operator==(const ProcessInstance&) const = default;
};

using Assignment = std::map<std::string, std::string, IdLess>;  // process -> vm

struct IterationOutcome {
  std::map<std::string, OutputRecord, IdLess> outputs;
  std::set<std::string, IdLess> failed_beyond_recovery;
  std::optional<bool> converged;
  std::optional<double> metric_value;
};

struct TaskCodeError {
  std::string process_id;
  std::string detail;
};

// Builds `count` Pending processes for one iteration of task `task_index`.
std::vector<ProcessInstance> MakeProcesses(int task_index, int iteration, const ScalarMap& params,
                                           int count);

// Round-robin over `vms` (sorted) in (task, process) order. A colocated task
// goes wholly onto the lowest vm. Throws kUnsatisfiableConstraint when there
// are processes but no VMs.
Assignment schedule(std::span<const ProcessInstance> processes, std::span<const std::string> vms,
                    const std::map<int, SchedulingConstraints>& constraints);

struct UnreachableSet {
  std::set<std::string, IdLess> lost_vms;
  std::set<std::string, IdLess> affected_processes;
};

UnreachableSet detect_unreachable(Provider& provider, const Assignment& assignment, Ticks now);

// Affected processes after `apply_ft_strategy`: each is either
// FailedBeyondRecovery or Rerunnable on a new healthy vm.
struct RevisedPlan {
  std::vector<ProcessInstance> processes;
};

RevisedPlan apply_ft_strategy(std::span<const ProcessInstance> affected, FtStrategy strategy,
                              int rerun_limit, std::span<const std::string> healthy_vms);

struct ConvergenceVerdict {
  bool converged = false;
  double metric = 0.0;
};

// Minimum of the metric over the iteration's outputs against the threshold
// (strict comparison). Throws kMissingMetric if no output carries it.
ConvergenceVerdict check_convergence(const IterationOutcome& outcome,
                                     const ConvergenceCriterion& criterion);

// Inputs to one iteration. Steps are issued at `start` (reachability polled
// there) and complete at `end`; reruns happen at `end`.
struct IterationContext {
  int task_index = 1;
  int iteration = 1;
  const TaskCodeRef* code = nullptr;
  const ExecParamT* params = nullptr;
  Ticks start = 0;
  Ticks end = 0;
};

struct IterationResult {
  IterationOutcome outcome;
  std::vector<ProcessInstance> processes;  // final status of every attempt
  std::set<std::string, IdLess> lost_vms;
  std::optional<TaskCodeError> code_error;
};

// Runs every process, routes VM losses through apply_ft_strategy and aborts
// on the first task-code failure.
IterationResult execute_iteration(Provider& provider, std::vector<ProcessInstance> processes,
                                  const Assignment& assignment, std::span<const std::string> pool,
                                  const IterationContext& ctx);

struct ExecutionContext {
  const SCDefinition* definition = nullptr;
  ScalarMap inputs;
  std::vector<std::string> pool;
  const CostModel* cost = nullptr;
  Ticks start = 0;
};

struct TraceEntry {
  Ticks time = 0;
  int task = 1;
  int iteration = 1;
  std::string process;
  std::string vm;
  ProcessStatus status = ProcessStatus::kPending;
  int rerun_count = 0;
};

struct TaskRunResult {
  bool ok = false;
  DataOutput output;              // valid when ok
  std::string failure;            // set when !ok
  int failed_task = 0;            // 1-based task index of the failure
  Ticks end = 0;
  std::map<int, int> iterations;  // per task, iterations run
  std::vector<TraceEntry> trace;
  std::set<std::string, IdLess> lost_vms;
};

// Tasks run strictly in order; each loops until its criterion holds or it
// reaches max_iterations (which still yields output, flagged unconverged).
TaskRunResult run_tasks(Provider& provider, const ExecutionContext& ctx);

Json TraceToJson(std::span<const TraceEntry> trace);

}  // namespace sconn

#endif  // SCONN_EXEC_EXECUTION_H_
