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

#ifndef SCONN_ENGINE_ENGINE_H_
#define SCONN_ENGINE_ENGINE_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sconn/cloud/fault_plan.h"
#include "sconn/cloud/provider.h"
#include "sconn/cloud/sim_provider.h"
#include "sconn/core/types.h"
#include "sconn/store/store.h"

namespace sconn {

// Internal results that drive the job state machine.
enum class Trigger {
  kBegin,
  kDataCheckOk,
  kDataCheckFail,
  kEnvReady,
  kEnvFailed,
  kExecOutput,
  kExecFailed,
  kTransferDone,
  kTransferFailed,
  kCleanedUp,
};

std::string_view EnumName(Trigger v);

struct TransitionRule {
  JobState from;
  Trigger trigger;
  JobState to;
  std::vector<SignalKind> emit;
};

// The complete rule table. Nothing leaves Completed.
const std::vector<TransitionRule>& TransitionRules();
// Throws kContractViolation when no rule matches.
const TransitionRule& LookupRule(JobState from, Trigger trigger);

// Component names used as event sources.
namespace source {
inline constexpr std::string_view kUser = "user";
inline constexpr std::string_view kDataAnalysis = "DataAnalysis";
inline constexpr std::string_view kEnvSetUp = "EnvSetUpVM";
inline constexpr std::string_view kExecution = "SCExecution";
inline constexpr std::string_view kTransfer = "OutputTransfer";
inline constexpr std::string_view kCleanUp = "EnvCleanUp";
}  // namespace source

struct CheckResult {
  bool ok = true;
  std::vector<std::string> reasons;
};

// Syntactic rules first ("steps: required", "x: expected real"), then
// semantic rules on the fields that are present and numeric.
CheckResult check_input(const ScalarMap& data_input, const DataConstraints& constraints);

// A Created job with [ScStart @ 0] logged. Throws kInvalidDefinition for a
// definition with violations and kInvalidArgument for a bad (iN, mN).
Job start_job(const SCDefinition& def, const ScalarMap& data_input, const UserReqVM& req,
              const std::string& destination, JobIdSource& ids);

// What a job runs against. The provider and fault source outlive the job.
struct Environment {
  Provider* provider = nullptr;
  FaultSource* faults = nullptr;
  CostModel cost;
  int transfer_retry_limit = 1;
  CurationIndex* curation = nullptr;  // optional
};

struct StepOutcome {
  Job job;
  std::vector<Signal> emitted;
};

// Advances one phase. Virtual time resumes from the last logged event.
// Throws kStepOnCompleted on a Completed job.
StepOutcome step(Job job, Environment& env);

// Steps until Completed. `on_step`, if set, sees the job after every step.
Job run_to_completion(Job job, Environment& env,
                      const std::function<void(const Job&)>& on_step = {});

// Owns a SimulatedProvider wired to a FaultSource.
class SimulatedRun {
 public:
  explicit SimulatedRun(FaultPlan plan, CostModel cost = CostModel::Uniform(1),
                        int transfer_retry_limit = 1);
  SimulatedRun(const SimulatedRun&) = delete;
  SimulatedRun& operator=(const SimulatedRun&) = delete;

  Environment& env() { return env_; }
  SimulatedProvider& provider() { return provider_; }
  FaultSource& faults() { return faults_; }

 private:
  FaultSource faults_;
  SimulatedProvider provider_;
  Environment env_;
};

// A dry run (nothing written) against a fresh simulated provider.
EventLog replay(const SCDefinition& def, const ScalarMap& data_input, const UserReqVM& req,
                const FaultPlan& plan, const CostModel& cost = CostModel::Uniform(1));

// Safety violations of a finished log; empty when it follows the protocol.
std::vector<std::string> check_protocol(const EventLog& log);

}  // namespace sconn

#endif  // SCONN_ENGINE_ENGINE_H_
