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

#include "sconn/exec/execution.h"

#include <algorithm>
#include <limits>

#include "sconn/core/error.h"
#include "sconn/exec/task_code_eval.h"

namespace sconn {
namespace {

bool ProcessOrder(const ProcessInstance& a, const ProcessInstance& b) {
  if (a.task_index != b.task_index) return a.task_index < b.task_index;
  return IdLess{}(a.process_id, b.process_id);
}

std::vector<std::string> Sorted(std::span<const std::string> vms) {
  std::vector<std::string> out(vms.begin(), vms.end());
  std::sort(out.begin(), out.end(), IdLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string PayloadPath(const std::string& process, int iteration) {
  return "payload/" + process + "-it" + std::to_string(iteration) + ".json";
}

OutputRecord MakeRecord(const ProcessInstance& p, const Json& output) {
  OutputRecord rec;
  rec.process = p.process_id;
  rec.task = p.task_index;
  rec.iteration = p.iteration;
  if (output.contains("metrics") && output["metrics"].is_object()) {
    for (const auto& [name, value] : output["metrics"].items()) {
      if (value.is_number()) rec.metrics[name] = value.get<double>();
    }
  }
  rec.payload_path = PayloadPath(p.process_id, p.iteration);
  rec.payload = output;
  return rec;
}

enum class RunStatus { kDone, kLost, kCodeFailed };

}  // namespace

std::string_view EnumName(ProcessStatus v) {
  switch (v) {
    case ProcessStatus::kPending: return "pending";
    case ProcessStatus::kRunning: return "running";
    case ProcessStatus::kDone: return "done";
    case ProcessStatus::kFailedBeyondRecovery: return "failed_beyond_recovery";
    case ProcessStatus::kRerunnable: return "rerunnable";
  }
  return "?";
}

std::vector<ProcessInstance> MakeProcesses(int task_index, int iteration, const ScalarMap& params,
                                           int count) {
  std::vector<ProcessInstance> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int n = 1; n <= count; ++n) {
    ProcessInstance p;
    p.process_id = "t" + std::to_string(task_index) + ".p" + std::to_string(n);
    p.task_index = task_index;
    p.iteration = iteration;
    p.params = params;
    p.params["task"] = static_cast<std::int64_t>(task_index);
    p.params["iteration"] = static_cast<std::int64_t>(iteration);
    p.params["process"] = p.process_id;
    out.push_back(std::move(p));
  }
  return out;
}

Assignment schedule(std::span<const ProcessInstance> processes, std::span<const std::string> vms,
                    const std::map<int, SchedulingConstraints>& constraints) {
  Assignment out;
  if (processes.empty()) return out;
  const auto sorted_vms = Sorted(vms);
  if (sorted_vms.empty()) {
    throw Error(ErrorCode::kUnsatisfiableConstraint,
                "no VMs available for " + std::to_string(processes.size()) + " processes");
  }
  std::vector<ProcessInstance> order(processes.begin(), processes.end());
  std::sort(order.begin(), order.end(), ProcessOrder);
  std::size_t next = 0;
  for (const auto& p : order) {
    auto c = constraints.find(p.task_index);
    if (c != constraints.end() && c->second.colocate) {
      out[p.process_id] = sorted_vms.front();
    } else {
      out[p.process_id] = sorted_vms[next++ % sorted_vms.size()];
    }
  }
  return out;
}

UnreachableSet detect_unreachable(Provider& provider, const Assignment& assignment, Ticks now) {
  UnreachableSet out;
  std::set<std::string, IdLess> vms;
  for (const auto& [process, vm] : assignment) vms.insert(vm);
  for (const auto& vm : vms) {
    if (!provider.IsReachable(vm, now)) out.lost_vms.insert(vm);
  }
  for (const auto& [process, vm] : assignment) {
    if (out.lost_vms.count(vm) != 0) out.affected_processes.insert(process);
  }
  return out;
}

RevisedPlan apply_ft_strategy(std::span<const ProcessInstance> affected, FtStrategy strategy,
                              int rerun_limit, std::span<const std::string> healthy_vms) {
  RevisedPlan plan;
  const auto healthy = Sorted(healthy_vms);
  std::vector<ProcessInstance> order(affected.begin(), affected.end());
  std::sort(order.begin(), order.end(), ProcessOrder);
  std::size_t next = 0;
  for (auto p : order) {
    p.output.reset();
    std::optional<std::string> target;
    if (strategy == FtStrategy::kRerunElsewhere && p.rerun_count < rerun_limit) {
      // Round-robin, skipping the process's own (lost) host.
      for (std::size_t tries = 0; tries < healthy.size() && !target; ++tries) {
        const auto& candidate = healthy[next++ % healthy.size()];
        if (candidate != p.assigned_vm) target = candidate;
      }
    }
    if (target) {
      p.assigned_vm = *target;
      p.rerun_count += 1;
      p.status = ProcessStatus::kRerunnable;
    } else {
      p.status = ProcessStatus::kFailedBeyondRecovery;
    }
    plan.processes.push_back(std::move(p));
  }
  return plan;
}

ConvergenceVerdict check_convergence(const IterationOutcome& outcome,
                                     const ConvergenceCriterion& criterion) {
  std::optional<double> metric;
  for (const auto& [process, record] : outcome.outputs) {
    auto it = record.metrics.find(criterion.metric_name);
    if (it == record.metrics.end()) continue;
    metric = metric ? std::min(*metric, it->second) : it->second;
  }
  if (!metric) {
    throw Error(ErrorCode::kMissingMetric,
                "no output carries metric '" + criterion.metric_name + "'");
  }
  const bool converged = criterion.direction == Direction::kBelow ? *metric < criterion.threshold
                                                                  : *metric > criterion.threshold;
  return ConvergenceVerdict{converged, *metric};
}

IterationResult execute_iteration(Provider& provider, std::vector<ProcessInstance> processes,
                                  const Assignment& assignment, std::span<const std::string> pool,
                                  const IterationContext& ctx) {
  IterationResult res;
  for (auto& p : processes) {
    auto it = assignment.find(p.process_id);
    if (it == assignment.end()) {
      throw Error(ErrorCode::kContractViolation, "process " + p.process_id + " is unassigned");
    }
    p.assigned_vm = it->second;
  }
  std::sort(processes.begin(), processes.end(), ProcessOrder);

  auto run = [&](ProcessInstance& p) {
    provider.AttachProcess(p.assigned_vm, p.process_id);
    p.status = ProcessStatus::kRunning;
    RemoteStep step;
    step.kind = StepKind::kTask;
    step.process_id = p.process_id;
    step.label = "task " + std::to_string(ctx.task_index) + " iteration " +
                 std::to_string(ctx.iteration) + " " + p.process_id;
    step.work = [&ctx, &p] { return EvaluateTaskCode(*ctx.code, p.params, ctx.iteration); };
    StepResult r = provider.RunRemote(p.assigned_vm, step, ctx.end);
    switch (r.status) {
      case StepResult::Status::kOk:
        p.status = ProcessStatus::kDone;
        p.output = MakeRecord(p, r.output);
        res.outcome.outputs[p.process_id] = *p.output;
        return RunStatus::kDone;
      case StepResult::Status::kVmUnreachable:
        res.lost_vms.insert(p.assigned_vm);
        return RunStatus::kLost;
      case StepResult::Status::kStepFailed:
        res.code_error = TaskCodeError{p.process_id, r.detail};
        return RunStatus::kCodeFailed;
    }
    return RunStatus::kLost;
  };

  // Poll before issuing: VMs already gone at `start` never receive work.
  const UnreachableSet before = detect_unreachable(provider, assignment, ctx.start);
  res.lost_vms.insert(before.lost_vms.begin(), before.lost_vms.end());

  std::vector<ProcessInstance> pending;
  for (auto& p : processes) {
    if (res.lost_vms.count(p.assigned_vm) != 0) {
      pending.push_back(p);
      continue;
    }
    const RunStatus s = run(p);
    res.processes.push_back(p);
    if (s == RunStatus::kCodeFailed) return res;
    if (s == RunStatus::kLost) pending.push_back(p);
  }

  const int rerun_limit = ctx.params ? ctx.params->rerun_limit : 0;
  const FtStrategy strategy = ctx.params ? ctx.params->ft_strategy : FtStrategy::kAbandonAndCollect;
  while (!pending.empty()) {
    std::vector<std::string> healthy;
    for (const auto& vm : pool) {
      if (res.lost_vms.count(vm) == 0) healthy.push_back(vm);
    }
    RevisedPlan revised = apply_ft_strategy(pending, strategy, rerun_limit, healthy);
    pending.clear();
    for (auto& q : revised.processes) {
      if (q.status == ProcessStatus::kFailedBeyondRecovery) {
        res.outcome.failed_beyond_recovery.insert(q.process_id);
        res.processes.push_back(q);
        continue;
      }
      res.processes.push_back(q);
      if (res.lost_vms.count(q.assigned_vm) != 0 || !provider.IsReachable(q.assigned_vm, ctx.end)) {
        res.lost_vms.insert(q.assigned_vm);
        pending.push_back(q);
        continue;
      }
      const RunStatus s = run(q);
      res.processes.push_back(q);
      if (s == RunStatus::kCodeFailed) return res;
      if (s == RunStatus::kLost) pending.push_back(q);
    }
  }
  return res;
}

TaskRunResult run_tasks(Provider& provider, const ExecutionContext& ctx) {
  TaskRunResult r;
  const SCDefinition& def = *ctx.definition;
  const CostModel& cost = *ctx.cost;
  Ticks now = ctx.start;
  std::vector<std::string> healthy = Sorted(ctx.pool);

  auto fail = [&](int task, std::string reason) {
    r.ok = false;
    r.failed_task = task;
    r.failure = std::move(reason);
    r.end = now;
    return r;
  };

  for (std::size_t k = 0; k < def.exec_param_t.size(); ++k) {
    const ExecParamT& params = def.exec_param_t[k];
    const TaskCodeRef& code = def.t_code[k];
    const int task = static_cast<int>(k) + 1;
    const std::string where = "task " + std::to_string(task);

    for (const auto& name : params.required_inputs) {
      if (ctx.inputs.count(name) == 0) {
        return fail(task, where + ": required input '" + name + "' is missing");
      }
    }
    std::map<int, SchedulingConstraints> constraints;
    if (params.scheduling_constraints) constraints[task] = *params.scheduling_constraints;

    TaskSummary summary;
    summary.task = task;
    for (int it = 1; it <= params.max_iterations; ++it) {
      const std::string at = where + " iteration " + std::to_string(it);
      // Constrained tasks ask for min_processes processes; others get one per VM.
      const int count = params.scheduling_constraints
                            ? std::max(params.scheduling_constraints->min_processes, 1)
                            : static_cast<int>(healthy.size());
      auto processes = MakeProcesses(task, it, ctx.inputs, count);
      Assignment assignment;
      try {
        assignment = schedule(processes, healthy, constraints);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUnsatisfiableConstraint) throw;
        return fail(task, at + ": scheduling failed: " + e.what());
      }

      IterationContext ictx{task, it, &code, &params, now, now + cost.TaskIterationCost(k)};
      IterationResult ir = execute_iteration(provider, std::move(processes), assignment, healthy, ictx);
      now = ictx.end;
      for (const auto& p : ir.processes) {
        r.trace.push_back(
            TraceEntry{now, task, it, p.process_id, p.assigned_vm, p.status, p.rerun_count});
      }
      for (const auto& vm : ir.lost_vms) {
        healthy.erase(std::remove(healthy.begin(), healthy.end(), vm), healthy.end());
        r.lost_vms.insert(vm);
      }
      r.iterations[task] = it;
      summary.iterations = it;

      if (ir.code_error) {
        return fail(task, where + " process " + ir.code_error->process_id +
                              " failed in task code: " + ir.code_error->detail);
      }
      if (ir.outcome.outputs.empty()) return fail(task, at + ": no collectible outputs remain");

      for (const auto& [process, record] : ir.outcome.outputs) r.output.records.push_back(record);
      for (const auto& process : ir.outcome.failed_beyond_recovery) {
        r.output.failed_processes.push_back(process + "@" + std::to_string(it));
        r.output.partial = true;
      }
      if (params.convergence) {
        ConvergenceVerdict v;
        try {
          v = check_convergence(ir.outcome, *params.convergence);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kMissingMetric) throw;
          return fail(task, at + ": " + e.what());
        }
        summary.final_metric = v.metric;
        summary.converged = v.converged;
        if (v.converged) break;
      }
    }
    r.output.tasks.push_back(summary);
  }
  r.ok = true;
  r.end = now;
  return r;
}

Json TraceToJson(std::span<const TraceEntry> trace) {
  Json out = Json::array();
  for (const auto& e : trace) {
    out.push_back(Json{{"t", e.time},
                       {"task", e.task},
                       {"iteration", e.iteration},
                       {"process", e.process},
                       {"vm", e.vm},
                       {"status", EnumName(e.status)},
                       {"rerun_count", e.rerun_count}});
  }
  return out;
}

}  // namespace sconn
