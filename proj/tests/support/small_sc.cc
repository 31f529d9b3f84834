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

#include "small_sc.h"

#include "sconn/core/json_io.h"

namespace sconn::testing {
namespace {

using S = SignalKind;

const std::vector<SignalKind> kSuccessKinds = {S::kScStart,       S::kDataCheckOk,
                                               S::kExecStart,     S::kTransferStart,
                                               S::kTransferCompleted, S::kScCompleted};
const std::vector<SignalKind> kVmFailKinds = {S::kScStart, S::kDataCheckOk, S::kVmFail,
                                              S::kScCompleted};
const std::vector<SignalKind> kExecFailKinds = {S::kScStart, S::kDataCheckOk, S::kExecStart,
                                                S::kExecFailed, S::kScCompleted};

Expected Baseline() { return Expected{OutcomeKind::kSuccess, 11, 12, false, kSuccessKinds}; }

Expected VmFailed() { return Expected{OutcomeKind::kVmFailed, 6, std::nullopt, std::nullopt, kVmFailKinds}; }

}  // namespace

SCDefinition SmallSc(FtStrategy ft, RetryStrategy rs, int rerun_limit) {
  SCDefinition def;
  def.name = "small";
  def.data_constraints.syntactic_rules = {FieldRule{"x0", ScalarType::kReal, true}};
  SemanticRule positive;
  positive.field = "x0";
  positive.op = CompareOp::kGt;
  positive.value = 0.0;
  def.data_constraints.semantic_rules = {positive};
  def.exec_param_vm = ExecParamVM{{"gcc"}, 1, rs, 1};

  ExecParamT t1;
  t1.required_inputs = {"x0"};
  t1.convergence = ConvergenceCriterion{"x", 1.0, Direction::kBelow};
  t1.max_iterations = 2;
  t1.rerun_limit = rerun_limit;
  t1.ft_strategy = ft;
  ExecParamT t2 = t1;
  t2.convergence.reset();

  def.exec_param_t = {t1, t2};
  def.t_code = {
      TaskCodeRef{TaskCodeKind::kBuiltinContraction,
                  Json{{"x0_input", "x0"}, {"factor", 0.5}, {"metric", "x"}}},
      TaskCodeRef{TaskCodeKind::kBuiltinArithmetic,
                  Json{{"op", "mul"}, {"lhs", "x0"}, {"rhs", "$iteration"}, {"metric", "y"}}},
  };
  return def;
}

ScalarMap SmallInput() { return {{"x0", 2.0}}; }

UserReqVM SmallReq() { return UserReqVM{3, 2}; }

SCDefinition ContractionSc() {
  SCDefinition def;
  def.name = "contraction";
  def.data_constraints.syntactic_rules = {FieldRule{"x0", ScalarType::kReal, true}};
  def.exec_param_vm = ExecParamVM{{"gcc"}, 1, RetryStrategy::kBlock, 1};
  ExecParamT t;
  t.required_inputs = {"x0"};
  t.convergence = ConvergenceCriterion{"x", 1.0, Direction::kBelow};
  t.scheduling_constraints = SchedulingConstraints{1, false};
  t.max_iterations = 10;
  t.rerun_limit = 1;
  t.ft_strategy = FtStrategy::kRerunElsewhere;
  def.exec_param_t = {t};
  def.t_code = {TaskCodeRef{TaskCodeKind::kBuiltinContraction,
                            Json{{"x0_input", "x0"}, {"factor", 0.5}, {"metric", "x"}}}};
  return def;
}

FaultPlan FailAt(FaultKind kind, std::size_t position) {
  FaultPlan plan;
  plan.queue(kind).assign(position + 1, PlanOutcome::kOk);
  plan.queue(kind)[position] = PlanOutcome::kFail;
  return plan;
}

FaultPlan LoseAt(const std::string& vm, Ticks from) {
  FaultPlan plan;
  plan.reachability = {ReachabilityLoss{vm, from}};
  return plan;
}

std::vector<PlanCase> SingleFaultPlans() {
  std::vector<PlanCase> out;
  const std::vector<std::pair<FaultKind, std::size_t>> queues = {
      {FaultKind::kCreateVm, 5},
      {FaultKind::kBootstrapStep, 7},
      {FaultKind::kTaskStep, 13},
      {FaultKind::kTransfer, 2},
  };
  for (const auto& [kind, count] : queues) {
    for (std::size_t p = 0; p < count; ++p) {
      out.push_back({std::string(FaultKindName(kind)) + "@" + std::to_string(p), FailAt(kind, p)});
    }
  }
  for (int vm = 0; vm < 3; ++vm) {
    for (Ticks t = 0; t <= 12; ++t) {
      const std::string id = "vm-" + std::to_string(vm);
      out.push_back({"loss " + id + "@" + std::to_string(t), LoseAt(id, t)});
    }
  }
  return out;
}

std::vector<PlanCase> MultiCreateFailPlans() {
  std::vector<PlanCase> out;
  for (unsigned mask = 0; mask < (1u << 6); ++mask) {
    const int bits = __builtin_popcount(mask);
    if (bits != 2 && bits != 3) continue;
    FaultPlan plan;
    std::string name = "create_vm fails";
    for (int p = 0; p < 6; ++p) {
      const bool fail = (mask >> p) & 1u;
      plan.create_vm.push_back(fail ? PlanOutcome::kFail : PlanOutcome::kOk);
      if (fail) name += " " + std::to_string(p);
    }
    out.push_back({name, plan});
  }
  return out;
}

std::vector<PlanCase> LossPairPlans() {
  std::vector<PlanCase> out;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (Ticks ta = 0; ta <= 9; ++ta) {
        for (Ticks tb = 0; tb <= 9; ++tb) {
          FaultPlan plan;
          const std::string va = "vm-" + std::to_string(a), vb = "vm-" + std::to_string(b);
          plan.reachability = {ReachabilityLoss{va, ta}, ReachabilityLoss{vb, tb}};
          out.push_back({"loss " + va + "@" + std::to_string(ta) + " " + vb + "@" +
                             std::to_string(tb),
                         plan});
        }
      }
    }
  }
  return out;
}

RunResult RunSmall(const FaultPlan& plan, FtStrategy ft, RetryStrategy rs, int rerun_limit) {
  RunResult r;
  r.run = std::make_unique<SimulatedRun>(plan, CostModel::Uniform(1));
  SequentialJobIds ids;
  Job job = start_job(SmallSc(ft, rs, rerun_limit), SmallInput(), SmallReq(), "", ids);
  SimulatedProvider& provider = r.run->provider();
  r.job = run_to_completion(std::move(job), r.run->env(), [&](const Job& j) {
    if (j.event_log.completed() && !provider.AllDestroyed()) r.leak_free = false;
  });
  return r;
}

std::map<std::string, int> TaskExecutions(const SimulatedProvider& provider) {
  std::map<std::string, int> out;
  for (const auto& call : provider.remote_calls()) {
    if (call.kind == StepKind::kTask) ++out[call.label];
  }
  return out;
}

Expected OracleSingleFault(const FaultPlan& plan, FtStrategy ft) {
  auto first_fail = [](const std::vector<PlanOutcome>& q) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == PlanOutcome::kFail) return i;
    }
    return std::nullopt;
  };
  // Three creates in one block; losing one still leaves mN = 2.
  if (auto p = first_fail(plan.create_vm); p && *p < 3) {
    return Expected{OutcomeKind::kSuccess, 10, 8, false, kSuccessKinds};
  }
  // Two bootstrap steps per VM, three VMs.
  if (auto p = first_fail(plan.bootstrap_step); p && *p < 6) return VmFailed();
  // Three task steps per iteration, iterations end at ticks 4, 5, 6, 7.
  if (auto p = first_fail(plan.task_step); p && *p < 12) {
    return Expected{OutcomeKind::kExecFailed, 7 + static_cast<Ticks>(*p / 3), std::nullopt,
                    std::nullopt, kExecFailKinds};
  }
  // One failed transfer is absorbed by the single retry.
  if (!plan.reachability.empty()) {
    const Ticks t = plan.reachability.front().from;
    if (t <= 2) return VmFailed();  // bootstrap runs at tick 2
    if (t <= 7) {
      const std::size_t d = static_cast<std::size_t>(std::max<Ticks>(0, t - 4));
      if (ft == FtStrategy::kAbandonAndCollect) {
        return Expected{OutcomeKind::kSuccess, 11, 8 + d, true, kSuccessKinds};
      }
      return Expected{OutcomeKind::kSuccess, 11, 9 + d, false, kSuccessKinds};
    }
  }
  return Baseline();
}

std::vector<std::string> CompareWithOracle(const Job& job, const Expected& want) {
  std::vector<std::string> diff;
  if (!job.outcome || job.outcome->kind != want.outcome) {
    diff.push_back("outcome " +
                   (job.outcome ? std::string(EnumName(job.outcome->kind)) : std::string("none")) +
                   " want " + std::string(EnumName(want.outcome)));
  }
  if (job.event_log.last_time() != want.end) {
    diff.push_back("end " + std::to_string(job.event_log.last_time()) + " want " +
                   std::to_string(want.end));
  }
  if (job.event_log.kinds() != want.kinds) diff.push_back("signal sequence differs");
  if (want.records) {
    const std::size_t got = job.data_output ? job.data_output->records.size() : 0;
    if (got != *want.records) {
      diff.push_back("records " + std::to_string(got) + " want " + std::to_string(*want.records));
    }
  }
  if (want.partial) {
    const bool got = job.data_output && job.data_output->partial;
    if (got != *want.partial) diff.push_back(std::string("partial ") + (got ? "true" : "false"));
  }
  return diff;
}

}  // namespace sconn::testing
