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

#include <set>

#include "../support/small_sc.h"
#include "sconn/core/error.h"
#include "sconn/sweep/sweep.h"

namespace sconn {
namespace {

Scalar I(std::int64_t v) { return v; }
Scalar Str(const char* s) { return std::string(s); }

TEST(ExpandSweep, EmptyAndSingleton) {
  const auto none = expand_sweep({});
  ASSERT_EQ(none.size(), 1u);
  EXPECT_TRUE(none[0].values.empty());
  SweepSpec one;
  one.variables["x"] = {I(0)};
  const auto b = expand_sweep(one);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].values, (ScalarMap{{"x", I(0)}}));
}

TEST(ExpandSweep, ProductMatchesBruteForce) {
  SweepSpec spec;
  spec.variables["T"] = {I(1), I(2), I(3)};
  spec.variables["p"] = {Str("a"), Str("b"), Str("c"), Str("d")};
  const auto got = expand_sweep(spec);
  std::vector<ScalarMap> want;
  for (const auto& t : spec.variables["T"]) {
    for (const auto& p : spec.variables["p"]) want.push_back({{"T", t}, {"p", p}});
  }
  ASSERT_EQ(got.size(), 12u);
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i].values, want[i]);
    EXPECT_EQ(got[i].binding_id, "b" + std::to_string(i));
  }
  EXPECT_EQ(expand_sweep(spec), got);
}

TEST(ExpandSweep, CardinalityIsTheProduct) {
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      for (int c = 1; c <= 2; ++c) {
        SweepSpec spec;
        for (int i = 0; i < a; ++i) spec.variables["a"].push_back(I(i));
        for (int i = 0; i < b; ++i) spec.variables["b"].push_back(I(i));
        for (int i = 0; i < c; ++i) spec.variables["c"].push_back(I(i));
        const auto got = expand_sweep(spec);
        EXPECT_EQ(got.size(), static_cast<std::size_t>(a * b * c));
        std::set<ScalarMap> distinct;
        for (const auto& x : got) distinct.insert(x.values);
        EXPECT_EQ(distinct.size(), got.size());
      }
    }
  }
}

TEST(ApplyBinding, BindingWins) {
  const ScalarMap out = ApplyBinding({{"x0", 1.0}, {"y", 2.0}}, SweepBinding{"b0", {{"x0", 5.0}}});
  EXPECT_EQ(out, (ScalarMap{{"x0", 5.0}, {"y", 2.0}}));
}

EnvFactory AllOk() {
  return [](std::size_t) { return std::make_unique<SimulatedRun>(FaultPlan::AllOk()); };
}

TEST(LaunchSweep, OneJobPerBindingAndIndependentFailures) {
  SCDefinition def = testing::ContractionSc();
  SemanticRule positive;
  positive.field = "x0";
  positive.op = CompareOp::kGt;
  positive.value = 0.0;
  def.data_constraints.semantic_rules = {positive};
  def.sweep.variables["x0"] = {8.0, -1.0, 4.0};
  SequentialJobIds ids;
  const auto launch = launch_sweep(def, {}, UserReqVM{2, 1}, AllOk(), ids);
  ASSERT_EQ(launch.job_ids.size(), 3u);
  EXPECT_EQ(launch.jobs[0].outcome->kind, OutcomeKind::kSuccess);
  EXPECT_EQ(launch.jobs[1].outcome->kind, OutcomeKind::kDataCheckFailed);
  EXPECT_EQ(launch.jobs[2].outcome->kind, OutcomeKind::kSuccess);
  EXPECT_EQ(launch.jobs[2].iteration.at(1), 3);  // 4 -> 2 -> 1 -> 0.5
  EXPECT_EQ(launch.jobs[0].sweep_binding.at("x0"), Scalar(8.0));
}

TEST(LaunchSweep, EmptySpecIsOneJob) {
  SequentialJobIds ids;
  const auto launch = launch_sweep(testing::ContractionSc(), {{"x0", 8.0}}, UserReqVM{1, 1}, AllOk(), ids);
  EXPECT_EQ(launch.job_ids.size(), 1u);
}

TEST(LaunchSweep, InvalidDefinitionLaunchesNothing) {
  SCDefinition def = testing::ContractionSc();
  def.name = "";
  int made = 0;
  EnvFactory counting = [&](std::size_t) {
    ++made;
    return std::make_unique<SimulatedRun>(FaultPlan::AllOk());
  };
  SequentialJobIds ids;
  EXPECT_THROW(launch_sweep(def, {{"x0", 8.0}}, UserReqVM{1, 1}, counting, ids), Error);
  EXPECT_EQ(made, 0);
}

// Permuting fault plans across jobs permutes outcomes the same way.
TEST(LaunchSweep, PermutingPlansPermutesOutcomes) {
  SCDefinition def = testing::SmallSc(FtStrategy::kAbandonAndCollect, RetryStrategy::kBlock);
  def.sweep.variables["x0"] = {1.0, 2.0, 3.0, 4.0};
  std::vector<FaultPlan> plans = {FaultPlan::AllOk(), testing::FailAt(FaultKind::kBootstrapStep, 0),
                                  testing::FailAt(FaultKind::kTaskStep, 4),
                                  testing::LoseAt("vm-1", 5)};
  auto run_with = [&](const std::vector<std::size_t>& order) {
    EnvFactory f = [&](std::size_t i) { return std::make_unique<SimulatedRun>(plans[order[i]]); };
    SequentialJobIds ids;
    return launch_sweep(def, {}, testing::SmallReq(), f, ids);
  };
  const auto base = run_with({0, 1, 2, 3});
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  const auto permuted = run_with(perm);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    // Job i under `permuted` ran plan perm[i]; compare with the base job that
    // ran the same plan, modulo the x0-dependent payload values.
    EXPECT_EQ(permuted.jobs[i].event_log.kinds(), base.jobs[perm[i]].event_log.kinds());
    EXPECT_EQ(permuted.jobs[i].outcome->kind, base.jobs[perm[i]].outcome->kind);
  }
}

}  // namespace
}  // namespace sconn
