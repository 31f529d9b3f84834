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

#include "sconn/engine/engine.h"

#include <algorithm>

#include "sconn/core/definition.h"
#include "sconn/core/error.h"
#include "sconn/exec/execution.h"
#include "sconn/vmenv/vm_env.h"

namespace sconn {
namespace {

using S = SignalKind;

bool TypeMatches(const Scalar& value, ScalarType type) {
  switch (type) {
    case ScalarType::kBool: return std::holds_alternative<bool>(value);
    case ScalarType::kInt: return std::holds_alternative<std::int64_t>(value);
    case ScalarType::kReal: return AsNumber(value).has_value();
    case ScalarType::kString: return std::holds_alternative<std::string>(value);
  }
  return false;
}

bool Compare(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::kLt: return lhs < rhs;
    case CompareOp::kLe: return lhs <= rhs;
    case CompareOp::kGt: return lhs > rhs;
    case CompareOp::kGe: return lhs >= rhs;
    case CompareOp::kEq: return lhs == rhs;
    case CompareOp::kNe: return lhs != rhs;
  }
  return false;
}

std::optional<double> NumericField(const ScalarMap& input, const std::string& name) {
  auto it = input.find(name);
  if (it == input.end()) return std::nullopt;
  return AsNumber(it->second);
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

Json IterationsJson(const std::map<int, int>& iterations) {
  Json out = Json::object();
  for (const auto& [task, n] : iterations) out[std::to_string(task)] = n;
  return out;
}

std::vector<Signal> Apply(Job& job, Trigger trigger, Ticks time, std::string_view src,
                          const Json& payload = nullptr) {
  const TransitionRule& rule = LookupRule(job.state, trigger);
  std::vector<Signal> emitted;
  for (SignalKind kind : rule.emit) {
    Signal s{kind, payload};
    job.event_log = append_event(std::move(job.event_log), time, s, std::string(src));
    emitted.push_back(std::move(s));
  }
  job.state = rule.to;
  return emitted;
}

// Outcome of a job about to complete: decided by the last terminal signal.
Outcome DeriveOutcome(const Job& job) {
  const auto& entries = job.event_log.entries();
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    const Signal& s = it->signal;
    std::string detail;
    if (s.payload.is_object() && s.payload.contains("reason")) {
      detail = s.payload["reason"].get<std::string>();
    }
    switch (s.kind) {
      case S::kVmFail: return Outcome{OutcomeKind::kVmFailed, detail};
      case S::kExecFailed: return Outcome{OutcomeKind::kExecFailed, detail};
      case S::kTransferCompleted: {
        const bool partial = job.data_output && job.data_output->partial;
        return Outcome{OutcomeKind::kSuccess, partial ? "partial output" : ""};
      }
      default: break;
    }
  }
  throw Error(ErrorCode::kContractViolation, "job " + job.job_id + " has no terminal signal");
}

std::vector<Signal> StepDataCheck(Job& job, Environment& env) {
  std::vector<Signal> emitted;
  if (job.state == JobState::kCreated) {
    emitted = Apply(job, Trigger::kBegin, job.event_log.last_time(), source::kDataAnalysis);
  }
  const Ticks t = job.event_log.last_time() + env.cost.data_check;
  const CheckResult check = check_input(job.data_input, job.definition.data_constraints);
  if (check.ok) {
    auto s = Apply(job, Trigger::kDataCheckOk, t, source::kDataAnalysis);
    emitted.insert(emitted.end(), s.begin(), s.end());
  } else {
    auto s = Apply(job, Trigger::kDataCheckFail, t, source::kDataAnalysis,
                   Json{{"reasons", check.reasons}});
    emitted.insert(emitted.end(), s.begin(), s.end());
    job.outcome = Outcome{OutcomeKind::kDataCheckFailed, Join(check.reasons)};
  }
  return emitted;
}

std::vector<Signal> StepEnvSetup(Job& job, Environment& env) {
  const ExecParamVM& param = job.definition.exec_param_vm;
  Ticks t = job.event_log.last_time();
  AcquisitionResult acq = acquire_vms(*env.provider, job.user_req_vm, param, t);
  std::sort(acq.generated_vm.begin(), acq.generated_vm.end(), IdLess{});
  job.vm_pool = acq.generated_vm;
  t += (1 + acq.attempts_used) * env.cost.vm_create_attempt;

  if (acq.verdict == Sufficiency::kInsufficient) {
    const std::string reason = "acquired " + std::to_string(job.vm_pool.size()) + " VMs, need " +
                               std::to_string(job.user_req_vm.minimal) + " after " +
                               std::to_string(acq.attempts_used) + " retries";
    return Apply(job, Trigger::kEnvFailed, t, source::kEnvSetUp,
                 Json{{"reason", reason}, {"vms", job.vm_pool}, {"attempts", acq.attempts_used}});
  }
  const BootstrapResult boot = bootstrap(*env.provider, job.vm_pool, param, t);
  t += env.cost.bootstrap;
  if (!boot.all_ready) {
    const std::string reason = "bootstrap of " + boot.failed_vm + " failed at step " +
                               std::to_string(boot.failed_step) + ": " + boot.reason;
    return Apply(job, Trigger::kEnvFailed, t, source::kEnvSetUp,
                 Json{{"reason", reason},
                      {"vms", job.vm_pool},
                      {"vm", boot.failed_vm},
                      {"step", boot.failed_step}});
  }
  return Apply(job, Trigger::kEnvReady, t, source::kEnvSetUp,
               Json{{"vms", job.vm_pool}, {"attempts", acq.attempts_used}});
}

std::vector<Signal> StepExecute(Job& job, Environment& env) {
  ExecutionContext ctx;
  ctx.definition = &job.definition;
  ctx.inputs = job.data_input;
  ctx.pool = job.vm_pool;
  ctx.cost = &env.cost;
  ctx.start = job.event_log.last_time();
  TaskRunResult r = run_tasks(*env.provider, ctx);
  job.iteration = r.iterations;
  Json payload{{"iterations", IterationsJson(r.iterations)},
               {"lost_vms", std::vector<std::string>(r.lost_vms.begin(), r.lost_vms.end())},
               {"trace", TraceToJson(r.trace)}};
  if (!r.ok) {
    payload["reason"] = r.failure;
    payload["task"] = r.failed_task;
    return Apply(job, Trigger::kExecFailed, r.end, source::kExecution, payload);
  }
  payload["records"] = r.output.records.size();
  payload["partial"] = r.output.partial;
  job.data_output = std::move(r.output);
  return Apply(job, Trigger::kExecOutput, r.end, source::kExecution, payload);
}

std::vector<Signal> StepTransfer(Job& job, Environment& env) {
  const Ticks t = job.event_log.last_time() + env.cost.transfer;
  const DataOutput empty;
  TransferResult res =
      transfer_output(job.data_output ? *job.data_output : empty, job.destination, job.job_id,
                      *env.faults, env.transfer_retry_limit, t);
  if (auto* failed = std::get_if<TransferFailed>(&res)) {
    const std::string reason =
        "output transfer failed after " + std::to_string(failed->attempts) + " attempts";
    return Apply(job, Trigger::kTransferFailed, t, source::kTransfer,
                 Json{{"reason", reason},
                      {"attempts", failed->attempts},
                      {"position", failed->position}});
  }
  job.receipt = std::get<TransferReceipt>(std::move(res));
  return Apply(job, Trigger::kTransferDone, t, source::kTransfer,
               Json{{"files", job.receipt->files.size()}, {"attempts", job.receipt->attempts}});
}

std::vector<Signal> StepCleanUp(Job& job, Environment& env) {
  const CleanupReport report =
      cleanup(*env.provider, job.vm_pool, job.event_log.last_time(), env.cost.cleanup_per_vm);
  job.outcome = DeriveOutcome(job);
  if (job.outcome->kind == OutcomeKind::kSuccess && env.curation && job.receipt) {
    env.curation->Curate(*job.receipt, job, report.time);
  }
  return Apply(job, Trigger::kCleanedUp, report.time, source::kCleanUp,
               Json{{"outcome", EnumName(job.outcome->kind)}, {"destroyed", report.destroyed}});
}

}  // namespace

std::string_view EnumName(Trigger v) {
  switch (v) {
    case Trigger::kBegin: return "begin";
    case Trigger::kDataCheckOk: return "data_check_ok";
    case Trigger::kDataCheckFail: return "data_check_fail";
    case Trigger::kEnvReady: return "env_ready";
    case Trigger::kEnvFailed: return "env_failed";
    case Trigger::kExecOutput: return "exec_output";
    case Trigger::kExecFailed: return "exec_failed";
    case Trigger::kTransferDone: return "transfer_done";
    case Trigger::kTransferFailed: return "transfer_failed";
    case Trigger::kCleanedUp: return "cleaned_up";
  }
  return "?";
}

const std::vector<TransitionRule>& TransitionRules() {
  static const std::vector<TransitionRule> rules = {
      {JobState::kCreated, Trigger::kBegin, JobState::kDataChecking, {}},
      {JobState::kDataChecking, Trigger::kDataCheckOk, JobState::kEnvSetup, {S::kDataCheckOk}},
      {JobState::kDataChecking, Trigger::kDataCheckFail, JobState::kCompleted, {S::kDataCheckFail}},
      {JobState::kEnvSetup, Trigger::kEnvReady, JobState::kExecuting, {S::kExecStart}},
      {JobState::kEnvSetup, Trigger::kEnvFailed, JobState::kCleaningUp, {S::kVmFail}},
      {JobState::kExecuting, Trigger::kExecOutput, JobState::kTransferring, {S::kTransferStart}},
      {JobState::kExecuting, Trigger::kExecFailed, JobState::kCleaningUp, {S::kExecFailed}},
      {JobState::kTransferring, Trigger::kTransferDone, JobState::kCleaningUp,
       {S::kTransferCompleted}},
      // No failure path exists for the transfer phase; it reports as an
      // execution failure and still cleans up.
      {JobState::kTransferring, Trigger::kTransferFailed, JobState::kCleaningUp, {S::kExecFailed}},
      {JobState::kCleaningUp, Trigger::kCleanedUp, JobState::kCompleted, {S::kScCompleted}},
  };
  return rules;
}

const TransitionRule& LookupRule(JobState from, Trigger trigger) {
  for (const auto& rule : TransitionRules()) {
    if (rule.from == from && rule.trigger == trigger) return rule;
  }
  throw Error(ErrorCode::kContractViolation, "no transition from " + std::string(EnumName(from)) +
                                                 " on " + std::string(EnumName(trigger)));
}

CheckResult check_input(const ScalarMap& data_input, const DataConstraints& constraints) {
  CheckResult result;
  for (const auto& rule : constraints.syntactic_rules) {
    auto it = data_input.find(rule.name);
    if (it == data_input.end()) {
      if (rule.required) result.reasons.push_back(rule.name + ": required");
      continue;
    }
    if (!TypeMatches(it->second, rule.type)) {
      result.reasons.push_back(rule.name + ": expected " + std::string(EnumName(rule.type)));
    }
  }
  for (const auto& rule : constraints.semantic_rules) {
    const auto lhs = NumericField(data_input, rule.field);
    const auto rhs = rule.value ? rule.value
                                : (rule.other_field ? NumericField(data_input, *rule.other_field)
                                                    : std::nullopt);
    if (!lhs || !rhs) continue;  // absent or ill-typed: reported syntactically if at all
    if (!Compare(*lhs, rule.op, *rhs)) result.reasons.push_back(rule.Describe());
  }
  result.ok = result.reasons.empty();
  return result;
}

Job start_job(const SCDefinition& def, const ScalarMap& data_input, const UserReqVM& req,
              const std::string& destination, JobIdSource& ids) {
  const auto violations = validate_definition(def);
  if (!violations.empty()) throw Error(ErrorCode::kInvalidDefinition, Join(violations));
  if (!req.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid VM request (" + std::to_string(req.ideal) +
                                                 ", " + std::to_string(req.minimal) + ")");
  }
  Job job;
  job.job_id = ids.NextJobId();
  job.definition = def;
  job.data_input = data_input;
  job.user_req_vm = req;
  job.destination = destination;
  job.event_log = append_event({}, 0, Signal{S::kScStart, nullptr}, std::string(source::kUser));
  return job;
}

StepOutcome step(Job job, Environment& env) {
  if (!env.provider || !env.faults) {
    throw Error(ErrorCode::kContractViolation, "environment lacks a provider or fault source");
  }
  std::vector<Signal> emitted;
  switch (job.state) {
    case JobState::kCreated:
    case JobState::kDataChecking: emitted = StepDataCheck(job, env); break;
    case JobState::kEnvSetup: emitted = StepEnvSetup(job, env); break;
    case JobState::kExecuting: emitted = StepExecute(job, env); break;
    case JobState::kTransferring: emitted = StepTransfer(job, env); break;
    case JobState::kCleaningUp: emitted = StepCleanUp(job, env); break;
    case JobState::kCompleted:
      throw Error(ErrorCode::kStepOnCompleted, "job " + job.job_id + " is completed");
  }
  return StepOutcome{std::move(job), std::move(emitted)};
}

Job run_to_completion(Job job, Environment& env, const std::function<void(const Job&)>& on_step) {
  while (job.state != JobState::kCompleted) {
    job = step(std::move(job), env).job;
    if (on_step) on_step(job);
  }
  return job;
}

SimulatedRun::SimulatedRun(FaultPlan plan, CostModel cost, int transfer_retry_limit)
    : faults_(std::move(plan)), provider_(faults_) {
  env_.provider = &provider_;
  env_.faults = &faults_;
  env_.cost = std::move(cost);
  env_.transfer_retry_limit = transfer_retry_limit;
}

EventLog replay(const SCDefinition& def, const ScalarMap& data_input, const UserReqVM& req,
                const FaultPlan& plan, const CostModel& cost) {
  SimulatedRun run(plan, cost);
  SequentialJobIds ids;
  Job job = start_job(def, data_input, req, "", ids);
  return run_to_completion(std::move(job), run.env()).event_log;
}

std::vector<std::string> check_protocol(const EventLog& log) {
  std::vector<std::string> out;
  const auto& e = log.entries();
  if (e.empty()) return {"log is empty"};
  if (e.front().signal.kind != S::kScStart) out.push_back("log does not open with scStart");

  auto name = [](SignalKind k) { return std::string(SignalName(k)); };
  bool data_ok = false, data_fail = false, exec_start = false, transfer_start = false;
  int terminal = 0, completed = 0, starts = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const SignalKind k = e[i].signal.kind;
    const std::string at = name(k) + " at entry " + std::to_string(i);
    if (i > 0 && e[i].virtual_time < e[i - 1].virtual_time) out.push_back(at + " goes back in time");
    if (data_fail) out.push_back(at + " follows dataCheckFail");
    switch (k) {
      case S::kScStart: ++starts; break;
      case S::kDataCheckOk: data_ok = true; break;
      case S::kDataCheckFail: data_fail = true; ++terminal; break;
      case S::kVmFail:
        if (!data_ok) out.push_back(at + " precedes dataCheckOk");
        ++terminal;
        break;
      case S::kExecStart:
        if (!data_ok) out.push_back(at + " precedes dataCheckOk");
        exec_start = true;
        break;
      case S::kExecFailed:
        if (!exec_start) out.push_back(at + " precedes execStart");
        ++terminal;
        break;
      case S::kTransferStart:
        if (!exec_start) out.push_back(at + " precedes execStart");
        transfer_start = true;
        break;
      case S::kTransferCompleted:
        if (!transfer_start) out.push_back(at + " precedes transferStart");
        ++terminal;
        break;
      case S::kScCompleted:
        ++completed;
        if (i + 1 != e.size()) out.push_back(at + " is not the last entry");
        break;
    }
    if ((k == S::kVmFail || k == S::kExecFailed || k == S::kTransferCompleted) &&
        e.back().signal.kind != S::kScCompleted) {
      out.push_back(at + " is not followed by scCompleted");
    }
  }
  if (starts != 1) out.push_back(std::to_string(starts) + " scStart entries");
  if (terminal > 1) out.push_back(std::to_string(terminal) + " terminal-outcome signals");
  if (completed > 1) out.push_back(std::to_string(completed) + " scCompleted entries");
  if (!data_fail && completed == 0) out.push_back("log is unfinished");
  return out;
}

}  // namespace sconn
