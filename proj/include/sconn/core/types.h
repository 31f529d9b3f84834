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

#ifndef SCONN_CORE_TYPES_H_
#define SCONN_CORE_TYPES_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sconn {

using Json = nlohmann::json;

// Virtual time. Abstract, integer, advanced only by the engine's clock.
using Ticks = std::int64_t;

using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using ScalarMap = std::map<std::string, Scalar>;

// Numeric view of a scalar; bools and strings are not numbers.
std::optional<double> AsNumber(const Scalar& value);
std::string ScalarToString(const Scalar& value);
// Shortest representation that round-trips ("4", "0.5", "1e-07").
std::string FormatNumber(double value);

// Identifier order used for every deterministic tie-break: lexicographic,
// except that digit runs compare by value ("vm-2" < "vm-10").
struct IdLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

}  // namespace sconn

// Scalar is a std::variant, so ADL cannot find sconn:: overloads for it.
namespace nlohmann {
template <>
struct adl_serializer<sconn::Scalar> {
  static void to_json(json& j, const sconn::Scalar& v);
  static void from_json(const json& j, sconn::Scalar& v);
};
}  // namespace nlohmann

namespace sconn {

// ---------------------------------------------------------------------------
// Signals

enum class SignalKind {
  kScStart,
  kDataCheckOk,
  kDataCheckFail,
  kVmFail,
  kExecStart,
  kExecFailed,
  kTransferStart,
  kTransferCompleted,
  kScCompleted,
};

inline constexpr std::array<SignalKind, 9> kAllSignalKinds = {
    SignalKind::kScStart,       SignalKind::kDataCheckOk,
    SignalKind::kDataCheckFail, SignalKind::kVmFail,
    SignalKind::kExecStart,     SignalKind::kExecFailed,
    SignalKind::kTransferStart, SignalKind::kTransferCompleted,
    SignalKind::kScCompleted,
};

// Wire names: "scStart", "dataCheckOk", ...
std::string_view SignalName(SignalKind kind);
std::optional<SignalKind> ParseSignalKind(std::string_view name);

struct Signal {
  SignalKind kind = SignalKind::kScStart;
  Json payload;  // null when the signal carries no detail

  bool operator==(const Signal&) const = default;
};

// ---------------------------------------------------------------------------
// Definition parameters

enum class ScalarType { kBool, kInt, kReal, kString };

struct FieldRule {
  std::string name;
  ScalarType type = ScalarType::kReal;
  bool required = false;

  bool operator==(const FieldRule&) const = default;
};

enum class CompareOp { kLt, kLe, kGt, kGe, kEq, kNe };

// `field op value` or `field op other_field`; exactly one right-hand side.
struct SemanticRule {
  std::string field;
  CompareOp op = CompareOp::kGe;
  std::optional<double> value;
  std::optional<std::string> other_field;

  std::string Describe() const;
  bool operator==(const SemanticRule&) const = default;
};

struct DataConstraints {
  std::vector<FieldRule> syntactic_rules;
  std::vector<SemanticRule> semantic_rules;

  bool operator==(const DataConstraints&) const = default;
};

enum class RetryStrategy { kBlock, kSingle };

struct ExecParamVM {
  std::vector<std::string> compilers;
  int retry_limit = 0;
  RetryStrategy retry_strategy = RetryStrategy::kBlock;
  int bootstrap_step_count = 1;

  bool operator==(const ExecParamVM&) const = default;
};

enum class Direction { kBelow, kAbove };

struct ConvergenceCriterion {
  std::string metric_name;
  double threshold = 0.0;
  Direction direction = Direction::kBelow;

  bool operator==(const ConvergenceCriterion&) const = default;
};

struct SchedulingConstraints {
  int min_processes = 1;
  bool colocate = false;

  bool operator==(const SchedulingConstraints&) const = default;
};

enum class FtStrategy { kAbandonAndCollect, kRerunElsewhere };

struct ExecParamT {
  std::vector<std::string> required_inputs;
  std::optional<ConvergenceCriterion> convergence;
  std::optional<SchedulingConstraints> scheduling_constraints;
  int max_iterations = 1;
  int rerun_limit = 0;
  FtStrategy ft_strategy = FtStrategy::kAbandonAndCollect;

  bool operator==(const ExecParamT&) const = default;
};

enum class TaskCodeKind { kBuiltinArithmetic, kBuiltinContraction, kExternalCommand };

struct TaskCodeRef {
  TaskCodeKind kind = TaskCodeKind::kBuiltinContraction;
  Json spec = Json::object();

  bool operator==(const TaskCodeRef&) const = default;
};

struct SweepSpec {
  std::map<std::string, std::vector<Scalar>> variables;

  bool empty() const { return variables.empty(); }
  bool operator==(const SweepSpec&) const = default;
};

// Names the engine injects into process parameters; sweeps may not use them.
inline constexpr std::array<std::string_view, 5> kReservedParameterNames = {
    "job_id", "task", "iteration", "process", "vm"};

struct SCDefinition {
  std::string name;
  DataConstraints data_constraints;
  ExecParamVM exec_param_vm;
  std::vector<ExecParamT> exec_param_t;
  std::vector<TaskCodeRef> t_code;
  SweepSpec sweep;

  std::size_t task_count() const { return exec_param_t.size(); }
  bool operator==(const SCDefinition&) const = default;
};

// The user's (iN, mN) pair.
struct UserReqVM {
  int ideal = 1;
  int minimal = 1;

  bool valid() const { return minimal >= 1 && minimal <= ideal; }
  bool operator==(const UserReqVM&) const = default;
};

// ---------------------------------------------------------------------------
// Jobs

enum class JobState {
  kCreated,
  kDataChecking,
  kEnvSetup,
  kExecuting,
  kTransferring,
  kCleaningUp,
  kCompleted,
};

enum class OutcomeKind { kSuccess, kDataCheckFailed, kVmFailed, kExecFailed };

struct Outcome {
  OutcomeKind kind = OutcomeKind::kSuccess;
  std::string detail;

  bool operator==(const Outcome&) const = default;
};

// One record per process per iteration.
struct OutputRecord {
  std::string process;
  int task = 1;
  int iteration = 1;
  std::map<std::string, double> metrics;
  std::string payload_path;
  Json payload;

  bool operator==(const OutputRecord&) const = default;
};

struct TaskSummary {
  int task = 1;
  int iterations = 0;
  std::optional<bool> converged;  // empty when the task has no criterion
  std::optional<double> final_metric;

  bool operator==(const TaskSummary&) const = default;
};

struct DataOutput {
  std::vector<OutputRecord> records;
  std::vector<TaskSummary> tasks;
  bool partial = false;
  std::vector<std::string> failed_processes;  // "<process>@<iteration>"

  bool operator==(const DataOutput&) const = default;
};

struct ManifestEntry {
  std::string path;
  std::uint64_t size = 0;
  std::string digest;  // hex SHA-256 of the written bytes

  bool operator==(const ManifestEntry&) const = default;
};

struct TransferReceipt {
  std::string destination_path;
  std::vector<ManifestEntry> files;
  Ticks completed_at = 0;
  int attempts = 1;

  bool operator==(const TransferReceipt&) const = default;
};

struct Event {
  Ticks virtual_time = 0;
  Signal signal;
  std::string source;

  bool operator==(const Event&) const = default;
};

// Append-only, time-monotone, closed by at most one ScCompleted.
class EventLog {
 public:
  EventLog() = default;

  const std::vector<Event>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  Ticks last_time() const { return entries_.empty() ? 0 : entries_.back().virtual_time; }
  bool completed() const;
  std::vector<SignalKind> kinds() const;

  bool operator==(const EventLog&) const = default;

  friend EventLog append_event(EventLog log, Ticks time, Signal signal, std::string source);

 private:
  std::vector<Event> entries_;
};

// Throws kTimeRegression when `time` precedes the last entry and
// kAppendAfterTerminal once ScCompleted has been logged.
EventLog append_event(EventLog log, Ticks time, Signal signal, std::string source);

struct Job {
  std::string job_id;
  SCDefinition definition;
  ScalarMap data_input;
  UserReqVM user_req_vm;
  JobState state = JobState::kCreated;
  std::vector<std::string> vm_pool;
  std::map<int, int> iteration;  // task index (1-based) -> iterations run
  EventLog event_log;
  std::optional<Outcome> outcome;

  std::string destination;
  ScalarMap sweep_binding;
  std::optional<DataOutput> data_output;
  std::optional<TransferReceipt> receipt;

  bool operator==(const Job&) const = default;
};

// Per-phase worst-case costs in ticks.
struct CostModel {
  Ticks data_check = 0;
  Ticks vm_create_attempt = 0;
  Ticks bootstrap = 0;
  std::vector<Ticks> task_iteration;  // indexed by task (0-based)
  Ticks task_iteration_default = 0;   // for tasks beyond task_iteration
  Ticks transfer = 0;
  Ticks cleanup_per_vm = 0;

  Ticks TaskIterationCost(std::size_t task) const {
    return task < task_iteration.size() ? task_iteration[task] : task_iteration_default;
  }

  static CostModel Uniform(Ticks cost);
  bool operator==(const CostModel&) const = default;
};

// ---------------------------------------------------------------------------
// Enum names (snake_case on the wire)

std::string_view EnumName(ScalarType v);
std::string_view EnumName(CompareOp v);
std::string_view EnumName(RetryStrategy v);
std::string_view EnumName(Direction v);
std::string_view EnumName(FtStrategy v);
std::string_view EnumName(TaskCodeKind v);
std::string_view EnumName(JobState v);
std::string_view EnumName(OutcomeKind v);

// Human-facing state names ("Completed", "Success").
std::string_view DisplayName(JobState v);
std::string_view DisplayName(OutcomeKind v);

}  // namespace sconn

#endif  // SCONN_CORE_TYPES_H_
