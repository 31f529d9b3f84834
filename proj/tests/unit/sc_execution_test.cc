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

#include <gtest/gtest.h>

#include "../support/small_sc.h"
#include "sconn/cloud/sim_provider.h"
#include "sconn/core/error.h"
#include "sconn/exec/execution.h"
#include "sconn/exec/task_code_eval.h"

namespace sconn {
namespace {

// n bootstrapped VMs over `plan`.
struct Pool {
  explicit Pool(int n, FaultPlan plan = FaultPlan::AllOk()) : src(std::move(plan)), provider(src) {
    for (int i = 0; i < n; ++i) {
      const auto vm = std::get<VmRecord>(provider.CreateVm()).vm_id;
      provider.MarkBootstrapped(vm);
      vms.push_back(vm);
    }
  }
  FaultSource src;
  SimulatedProvider provider;
  std::vector<std::string> vms;
};

ProcessInstance Proc(const std::string& id, int task, const std::string& vm, int reruns = 0) {
  ProcessInstance p;
  p.process_id = id;
  p.task_index = task;
  p.assigned_vm = vm;
  p.rerun_count = reruns;
  return p;
}

TEST(Schedule, RoundRobinInProcessOrder) {
  auto procs = MakeProcesses(1, 1, {}, 4);
  const std::vector<std::string> vms = {"vm-1", "vm-0"};
  const Assignment a = schedule(procs, vms, {});
  EXPECT_EQ(a.at("t1.p1"), "vm-0");
  EXPECT_EQ(a.at("t1.p2"), "vm-1");
  EXPECT_EQ(a.at("t1.p3"), "vm-0");
  EXPECT_EQ(a.at("t1.p4"), "vm-1");
}

TEST(Schedule, ColocateUsesLowestVm) {
  auto procs = MakeProcesses(2, 1, {}, 3);
  const std::vector<std::string> vms = {"vm-10", "vm-2"};
  const Assignment a = schedule(procs, vms, {{2, SchedulingConstraints{3, true}}});
  for (const auto& [pid, vm] : a) EXPECT_EQ(vm, "vm-2");
}

TEST(Schedule, NoVmsIsUnsatisfiable) {
  auto procs = MakeProcesses(1, 1, {}, 1);
  try {
    schedule(procs, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsatisfiableConstraint);
  }
  EXPECT_TRUE(schedule({}, {}, {}).empty());
}

TEST(Schedule, EveryProcessAssignedToAGivenVm) {
  for (int n = 1; n <= 7; ++n) {
    for (int m = 1; m <= 4; ++m) {
      auto procs = MakeProcesses(1, 1, {}, n);
      std::vector<std::string> vms;
      for (int i = 0; i < m; ++i) vms.push_back("vm-" + std::to_string(i));
      const Assignment a = schedule(procs, vms, {});
      ASSERT_EQ(a.size(), static_cast<std::size_t>(n));
      std::map<std::string, int> load;
      for (const auto& [pid, vm] : a) ++load[vm];
      // Round-robin keeps loads within one of each other.
      int lo = n, hi = 0;
      for (const auto& vm : vms) {
        lo = std::min(lo, load[vm]);
        hi = std::max(hi, load[vm]);
      }
      EXPECT_LE(hi - lo, 1);
    }
  }
}

TEST(DetectUnreachable, ReportsLostVmsAndTheirProcesses) {
  FaultPlan plan;
  plan.reachability = {{"vm-1", 2}};
  Pool pool(2, plan);
  const Assignment a{{"t1.p1", "vm-0"}, {"t1.p2", "vm-1"}, {"t1.p3", "vm-1"}};
  EXPECT_TRUE(detect_unreachable(pool.provider, a, 1).lost_vms.empty());
  const auto u = detect_unreachable(pool.provider, a, 2);
  EXPECT_EQ(u.lost_vms, (std::set<std::string, IdLess>{"vm-1"}));
  EXPECT_EQ(u.affected_processes, (std::set<std::string, IdLess>{"t1.p2", "t1.p3"}));
}

TEST(ApplyFtStrategy, Examples) {
  const std::vector<std::string> healthy = {"vm-1"};
  auto rerun = apply_ft_strategy(std::vector{Proc("p2", 1, "vm-0")}, FtStrategy::kRerunElsewhere, 2,
                                 healthy);
  ASSERT_EQ(rerun.processes.size(), 1u);
  EXPECT_EQ(rerun.processes[0].assigned_vm, "vm-1");
  EXPECT_EQ(rerun.processes[0].rerun_count, 1);
  EXPECT_EQ(rerun.processes[0].status, ProcessStatus::kRerunnable);

  auto abandon = apply_ft_strategy(std::vector{Proc("p2", 1, "vm-0")},
                                   FtStrategy::kAbandonAndCollect, 2, healthy);
  EXPECT_EQ(abandon.processes[0].status, ProcessStatus::kFailedBeyondRecovery);

  auto exhausted = apply_ft_strategy(std::vector{Proc("p2", 1, "vm-0", 2)},
                                     FtStrategy::kRerunElsewhere, 2, healthy);
  EXPECT_EQ(exhausted.processes[0].status, ProcessStatus::kFailedBeyondRecovery);

  auto nowhere = apply_ft_strategy(std::vector{Proc("p2", 1, "vm-0")}, FtStrategy::kRerunElsewhere,
                                   2, std::vector<std::string>{});
  EXPECT_EQ(nowhere.processes[0].status, ProcessStatus::kFailedBeyondRecovery);
}

TEST(ApplyFtStrategy, NeverReturnsToTheLostHost) {
  auto plan = apply_ft_strategy(std::vector{Proc("p1", 1, "vm-0"), Proc("p2", 1, "vm-0")},
                                FtStrategy::kRerunElsewhere, 1,
                                std::vector<std::string>{"vm-0", "vm-1"});
  for (const auto& p : plan.processes) EXPECT_EQ(p.assigned_vm, "vm-1");
}

IterationOutcome Outputs(std::vector<double> xs) {
  IterationOutcome o;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    OutputRecord r;
    r.process = "t1.p" + std::to_string(i + 1);
    r.metrics["x"] = xs[i];
    o.outputs[r.process] = r;
  }
  return o;
}

TEST(CheckConvergence, MinimumAgainstStrictThreshold) {
  const ConvergenceCriterion below{"x", 1.0, Direction::kBelow};
  EXPECT_FALSE(check_convergence(Outputs({1.0, 3.0}), below).converged);
  const auto v = check_convergence(Outputs({2.0, 0.5}), below);
  EXPECT_TRUE(v.converged);
  EXPECT_EQ(v.metric, 0.5);
  const ConvergenceCriterion above{"x", 1.0, Direction::kAbove};
  EXPECT_TRUE(check_convergence(Outputs({2.0, 3.0}), above).converged);
  EXPECT_FALSE(check_convergence(Outputs({1.0, 3.0}), above).converged);
}

TEST(CheckConvergence, MissingMetric) {
  try {
    check_convergence(Outputs({1.0}), ConvergenceCriterion{"energy", 1.0, Direction::kBelow});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingMetric);
  }
}

TEST(TaskCode, ContractionMatchesClosedForm) {
  const TaskCodeRef code{TaskCodeKind::kBuiltinContraction, Json{{"x0", 8.0}, {"factor", 0.5}}};
  double x = 8.0;
  for (int i = 1; i <= 6; ++i) {
    x *= 0.5;
    EXPECT_EQ(EvaluateTaskCode(code, {}, i)["metrics"]["x"].get<double>(), x);
  }
}

TEST(TaskCode, ArithmeticAndCommands) {
  const TaskCodeRef mul{TaskCodeKind::kBuiltinArithmetic,
                        Json{{"op", "mul"}, {"lhs", "x0"}, {"rhs", "$iteration"}, {"metric", "y"}}};
  EXPECT_EQ(EvaluateTaskCode(mul, {{"x0", 2.0}}, 3)["metrics"]["y"].get<double>(), 6.0);
  const TaskCodeRef div{TaskCodeKind::kBuiltinArithmetic, Json{{"op", "div"}, {"lhs", 1}, {"rhs", 0}}};
  EXPECT_THROW(EvaluateTaskCode(div, {}, 1), Error);
  const TaskCodeRef cmd{TaskCodeKind::kExternalCommand, Json{{"command", "sim --T {T} --it {iteration}"}}};
  EXPECT_EQ(EvaluateTaskCode(cmd, {{"T", std::int64_t{300}}}, 2)["command"], "sim --T 300 --it 2");
}

ExecutionContext Ctx(const SCDefinition& def, const ScalarMap& in, const Pool& pool,
                     const CostModel& cost) {
  return ExecutionContext{&def, in, pool.vms, &cost, 3};
}

TEST(RunTasks, ContractionConvergesInFourIterations) {
  const SCDefinition def = testing::ContractionSc();
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(3);
  const TaskRunResult r = run_tasks(pool.provider, Ctx(def, {{"x0", 8.0}}, pool, cost));
  ASSERT_TRUE(r.ok) << r.failure;
  EXPECT_EQ(r.iterations.at(1), 4);
  ASSERT_EQ(r.output.records.size(), 4u);
  const std::vector<double> want = {4, 2, 1, 0.5};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r.output.records[i].metrics.at("x"), want[i]);
  EXPECT_EQ(r.output.tasks[0].converged, true);
  EXPECT_EQ(r.end, 7);
}

TEST(RunTasks, UnconvergedAtMaxIterationsStillSucceeds) {
  SCDefinition def = testing::ContractionSc();
  def.exec_param_t[0].max_iterations = 2;
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(1);
  const TaskRunResult r = run_tasks(pool.provider, Ctx(def, {{"x0", 8.0}}, pool, cost));
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.output.tasks[0].converged, false);
  EXPECT_EQ(r.output.tasks[0].final_metric, 2.0);
}

TEST(RunTasks, TasksRunStrictlyInOrder) {
  const SCDefinition def = testing::SmallSc(FtStrategy::kRerunElsewhere, RetryStrategy::kBlock);
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(3);
  const TaskRunResult r = run_tasks(pool.provider, Ctx(def, testing::SmallInput(), pool, cost));
  ASSERT_TRUE(r.ok);
  Ticks last_task1 = 0, first_task2 = 1 << 30;
  for (const auto& e : r.trace) {
    if (e.task == 1) last_task1 = std::max(last_task1, e.time);
    if (e.task == 2) first_task2 = std::min(first_task2, e.time);
  }
  EXPECT_LT(last_task1, first_task2);
  // The provider saw every task-1 call before any task-2 call.
  bool seen2 = false;
  for (const auto& c : pool.provider.remote_calls()) {
    if (c.process_id.rfind("t2.", 0) == 0) seen2 = true;
    if (c.process_id.rfind("t1.", 0) == 0) EXPECT_FALSE(seen2);
  }
  EXPECT_EQ(r.output.records.size(), 12u);
}

TEST(RunTasks, LossOfOnlyVmWithAbandonFails) {
  const SCDefinition def = testing::SmallSc(FtStrategy::kAbandonAndCollect, RetryStrategy::kBlock);
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(1, testing::LoseAt("vm-0", 4));
  const TaskRunResult r = run_tasks(pool.provider, Ctx(def, testing::SmallInput(), pool, cost));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.failed_task, 1);
  EXPECT_NE(r.failure.find("no collectible outputs"), std::string::npos);
}

TEST(RunTasks, AbandonKeepsSurvivorsAndFlagsPartial) {
  const SCDefinition def = testing::SmallSc(FtStrategy::kAbandonAndCollect, RetryStrategy::kBlock);
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(3, testing::LoseAt("vm-1", 3));
  const TaskRunResult r = run_tasks(pool.provider, Ctx(def, testing::SmallInput(), pool, cost));
  ASSERT_TRUE(r.ok);
  EXPECT_TRUE(r.output.partial);
  EXPECT_EQ(r.output.failed_processes, (std::vector<std::string>{"t1.p2@1"}));
  for (const auto& rec : r.output.records) {
    EXPECT_FALSE(rec.process == "t1.p2" && rec.iteration == 1);
  }
}

TEST(RunTasks, RerunMovesWorkOffTheLostVm) {
  const SCDefinition def = testing::SmallSc(FtStrategy::kRerunElsewhere, RetryStrategy::kBlock);
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(3, testing::LoseAt("vm-1", 3));
  const TaskRunResult r = run_tasks(pool.provider, Ctx(def, testing::SmallInput(), pool, cost));
  ASSERT_TRUE(r.ok);
  EXPECT_FALSE(r.output.partial);
  bool rerun_seen = false;
  for (const auto& e : r.trace) {
    if (e.process == "t1.p2" && e.iteration == 1 && e.status == ProcessStatus::kDone) {
      EXPECT_NE(e.vm, "vm-1");
      EXPECT_EQ(e.rerun_count, 1);
      rerun_seen = true;
    }
  }
  EXPECT_TRUE(rerun_seen);
}

TEST(RunTasks, MissingRequiredInputAndCodeErrors) {
  const CostModel cost = CostModel::Uniform(1);
  Pool pool(1);
  const SCDefinition def = testing::ContractionSc();
  const TaskRunResult missing = run_tasks(pool.provider, Ctx(def, {}, pool, cost));
  EXPECT_FALSE(missing.ok);
  EXPECT_NE(missing.failure.find("required input 'x0' is missing"), std::string::npos);

  SCDefinition bad = testing::ContractionSc();
  bad.t_code[0] = TaskCodeRef{TaskCodeKind::kBuiltinArithmetic,
                              Json{{"op", "div"}, {"lhs", "x0"}, {"rhs", 0}, {"metric", "x"}}};
  const TaskRunResult err = run_tasks(pool.provider, Ctx(bad, {{"x0", 1.0}}, pool, cost));
  EXPECT_FALSE(err.ok);
  EXPECT_NE(err.failure.find("division by zero"), std::string::npos);
}

}  // namespace
}  // namespace sconn
