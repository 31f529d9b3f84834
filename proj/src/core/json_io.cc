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

#include "sconn/core/json_io.h"

#include <sstream>

#include "sconn/core/error.h"

namespace sconn {
namespace {

template <typename E, std::size_t N>
E EnumFromJson(const Json& j, const std::array<E, N>& values, std::string_view what) {
  if (!j.is_string()) throw Error(ErrorCode::kParse, std::string(what) + " must be a string");
  const auto name = j.get<std::string>();
  for (E v : values) {
    if (EnumName(v) == name) return v;
  }
  throw Error(ErrorCode::kParse, "unknown " + std::string(what) + " '" + name + "'");
}

constexpr std::array kScalarTypes = {ScalarType::kBool, ScalarType::kInt, ScalarType::kReal,
                                     ScalarType::kString};
constexpr std::array kCompareOps = {CompareOp::kLt, CompareOp::kLe, CompareOp::kGt,
                                    CompareOp::kGe, CompareOp::kEq, CompareOp::kNe};
constexpr std::array kRetryStrategies = {RetryStrategy::kBlock, RetryStrategy::kSingle};
constexpr std::array kDirections = {Direction::kBelow, Direction::kAbove};
constexpr std::array kFtStrategies = {FtStrategy::kAbandonAndCollect, FtStrategy::kRerunElsewhere};
constexpr std::array kTaskCodeKinds = {TaskCodeKind::kBuiltinArithmetic,
                                       TaskCodeKind::kBuiltinContraction,
                                       TaskCodeKind::kExternalCommand};
constexpr std::array kJobStates = {JobState::kCreated,    JobState::kDataChecking,
                                   JobState::kEnvSetup,   JobState::kExecuting,
                                   JobState::kTransferring, JobState::kCleaningUp,
                                   JobState::kCompleted};
constexpr std::array kOutcomeKinds = {OutcomeKind::kSuccess, OutcomeKind::kDataCheckFailed,
                                      OutcomeKind::kVmFailed, OutcomeKind::kExecFailed};

template <typename T>
Json Opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> OptField(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

template <typename T>
T Field(const Json& j, const char* key) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, std::string("expected object with '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T FieldOr(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return Field<T>(j, key);
}

}  // namespace

Json ParseJson(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

void to_json(Json& j, const Signal& v) {
  j = Json{{"kind", SignalName(v.kind)}, {"payload", v.payload}};
}

void from_json(const Json& j, Signal& v) {
  auto kind = ParseSignalKind(Field<std::string>(j, "kind"));
  if (!kind) throw Error(ErrorCode::kParse, "unknown signal kind " + j["kind"].dump());
  v.kind = *kind;
  v.payload = j.value("payload", Json());
}

void to_json(Json& j, const FieldRule& v) {
  j = Json{{"name", v.name}, {"type", EnumName(v.type)}, {"required", v.required}};
}

void from_json(const Json& j, FieldRule& v) {
  v.name = Field<std::string>(j, "name");
  v.type = EnumFromJson(Field<Json>(j, "type"), kScalarTypes, "scalar type");
  v.required = FieldOr<bool>(j, "required", false);
}

void to_json(Json& j, const SemanticRule& v) {
  j = Json{{"field", v.field}, {"op", EnumName(v.op)}};
  if (v.value) j["value"] = *v.value;
  if (v.other_field) j["other_field"] = *v.other_field;
}

void from_json(const Json& j, SemanticRule& v) {
  v.field = Field<std::string>(j, "field");
  v.op = EnumFromJson(Field<Json>(j, "op"), kCompareOps, "comparison");
  v.value = OptField<double>(j, "value");
  v.other_field = OptField<std::string>(j, "other_field");
}

void to_json(Json& j, const DataConstraints& v) {
  j = Json{{"syntactic_rules", v.syntactic_rules}, {"semantic_rules", v.semantic_rules}};
}

void from_json(const Json& j, DataConstraints& v) {
  v.syntactic_rules = FieldOr<std::vector<FieldRule>>(j, "syntactic_rules", {});
  v.semantic_rules = FieldOr<std::vector<SemanticRule>>(j, "semantic_rules", {});
}

void to_json(Json& j, const ExecParamVM& v) {
  j = Json{{"compilers", v.compilers},
           {"retry_limit", v.retry_limit},
           {"retry_strategy", EnumName(v.retry_strategy)},
           {"bootstrap_step_count", v.bootstrap_step_count}};
}

void from_json(const Json& j, ExecParamVM& v) {
  v.compilers = FieldOr<std::vector<std::string>>(j, "compilers", {});
  v.retry_limit = FieldOr<int>(j, "retry_limit", 0);
  v.retry_strategy = j.contains("retry_strategy")
                         ? EnumFromJson(j["retry_strategy"], kRetryStrategies, "retry strategy")
                         : RetryStrategy::kBlock;
  v.bootstrap_step_count = FieldOr<int>(j, "bootstrap_step_count", 1);
}

void to_json(Json& j, const ConvergenceCriterion& v) {
  j = Json{{"metric_name", v.metric_name},
           {"threshold", v.threshold},
           {"direction", EnumName(v.direction)}};
}

void from_json(const Json& j, ConvergenceCriterion& v) {
  v.metric_name = Field<std::string>(j, "metric_name");
  v.threshold = Field<double>(j, "threshold");
  v.direction = j.contains("direction") ? EnumFromJson(j["direction"], kDirections, "direction")
                                        : Direction::kBelow;
}

void to_json(Json& j, const SchedulingConstraints& v) {
  j = Json{{"min_processes", v.min_processes}, {"colocate", v.colocate}};
}

void from_json(const Json& j, SchedulingConstraints& v) {
  v.min_processes = FieldOr<int>(j, "min_processes", 1);
  v.colocate = FieldOr<bool>(j, "colocate", false);
}

void to_json(Json& j, const ExecParamT& v) {
  j = Json{{"required_inputs", v.required_inputs},
           {"convergence", Opt(v.convergence)},
           {"scheduling_constraints", Opt(v.scheduling_constraints)},
           {"max_iterations", v.max_iterations},
           {"rerun_limit", v.rerun_limit},
           {"ft_strategy", EnumName(v.ft_strategy)}};
}

void from_json(const Json& j, ExecParamT& v) {
  v.required_inputs = FieldOr<std::vector<std::string>>(j, "required_inputs", {});
  v.convergence = OptField<ConvergenceCriterion>(j, "convergence");
  v.scheduling_constraints = OptField<SchedulingConstraints>(j, "scheduling_constraints");
  v.max_iterations = FieldOr<int>(j, "max_iterations", 1);
  v.rerun_limit = FieldOr<int>(j, "rerun_limit", 0);
  v.ft_strategy = j.contains("ft_strategy")
                      ? EnumFromJson(j["ft_strategy"], kFtStrategies, "ft strategy")
                      : FtStrategy::kAbandonAndCollect;
}

void to_json(Json& j, const TaskCodeRef& v) {
  j = Json{{"kind", EnumName(v.kind)}, {"spec", v.spec}};
}

void from_json(const Json& j, TaskCodeRef& v) {
  v.kind = EnumFromJson(Field<Json>(j, "kind"), kTaskCodeKinds, "task code kind");
  v.spec = j.value("spec", Json::object());
}

void to_json(Json& j, const SweepSpec& v) {
  j = Json::object();
  for (const auto& [name, values] : v.variables) j[name] = values;
}

void from_json(const Json& j, SweepSpec& v) {
  v.variables.clear();
  if (j.is_null()) return;
  if (!j.is_object()) throw Error(ErrorCode::kParse, "sweep must be an object of value lists");
  for (const auto& [name, values] : j.items()) {
    if (!values.is_array()) {
      throw Error(ErrorCode::kParse, "sweep variable '" + name + "' must be a list");
    }
    v.variables[name] = values.get<std::vector<Scalar>>();
  }
}

void to_json(Json& j, const SCDefinition& v) {
  j = Json{{"name", v.name},
           {"data_constraints", v.data_constraints},
           {"exec_param_vm", v.exec_param_vm},
           {"exec_param_t", v.exec_param_t},
           {"t_code", v.t_code},
           {"sweep", v.sweep}};
}

void from_json(const Json& j, SCDefinition& v) {
  v.name = Field<std::string>(j, "name");
  v.data_constraints = FieldOr<DataConstraints>(j, "data_constraints", {});
  v.exec_param_vm = FieldOr<ExecParamVM>(j, "exec_param_vm", {});
  v.exec_param_t = Field<std::vector<ExecParamT>>(j, "exec_param_t");
  v.t_code = Field<std::vector<TaskCodeRef>>(j, "t_code");
  v.sweep = FieldOr<SweepSpec>(j, "sweep", {});
}

void to_json(Json& j, const UserReqVM& v) { j = Json{{"ideal", v.ideal}, {"minimal", v.minimal}}; }

void from_json(const Json& j, UserReqVM& v) {
  v.ideal = Field<int>(j, "ideal");
  v.minimal = Field<int>(j, "minimal");
}

void to_json(Json& j, JobState v) { j = EnumName(v); }
void from_json(const Json& j, JobState& v) { v = EnumFromJson(j, kJobStates, "job state"); }
void to_json(Json& j, OutcomeKind v) { j = EnumName(v); }
void from_json(const Json& j, OutcomeKind& v) { v = EnumFromJson(j, kOutcomeKinds, "outcome"); }

void to_json(Json& j, const Outcome& v) { j = Json{{"kind", v.kind}, {"detail", v.detail}}; }

void from_json(const Json& j, Outcome& v) {
  v.kind = Field<OutcomeKind>(j, "kind");
  v.detail = FieldOr<std::string>(j, "detail", "");
}

void to_json(Json& j, const OutputRecord& v) {
  j = Json{{"process", v.process},   {"task", v.task},
           {"iteration", v.iteration}, {"metrics", v.metrics},
           {"payload_path", v.payload_path}, {"payload", v.payload}};
}

void from_json(const Json& j, OutputRecord& v) {
  v.process = Field<std::string>(j, "process");
  v.task = Field<int>(j, "task");
  v.iteration = Field<int>(j, "iteration");
  v.metrics = FieldOr<std::map<std::string, double>>(j, "metrics", {});
  v.payload_path = FieldOr<std::string>(j, "payload_path", "");
  v.payload = j.value("payload", Json());
}

void to_json(Json& j, const TaskSummary& v) {
  j = Json{{"task", v.task},
           {"iterations", v.iterations},
           {"converged", Opt(v.converged)},
           {"final_metric", Opt(v.final_metric)}};
}

void from_json(const Json& j, TaskSummary& v) {
  v.task = Field<int>(j, "task");
  v.iterations = Field<int>(j, "iterations");
  v.converged = OptField<bool>(j, "converged");
  v.final_metric = OptField<double>(j, "final_metric");
}

void to_json(Json& j, const DataOutput& v) {
  j = Json{{"records", v.records},
           {"tasks", v.tasks},
           {"partial", v.partial},
           {"failed_processes", v.failed_processes}};
}

void from_json(const Json& j, DataOutput& v) {
  v.records = FieldOr<std::vector<OutputRecord>>(j, "records", {});
  v.tasks = FieldOr<std::vector<TaskSummary>>(j, "tasks", {});
  v.partial = FieldOr<bool>(j, "partial", false);
  v.failed_processes = FieldOr<std::vector<std::string>>(j, "failed_processes", {});
}

void to_json(Json& j, const ManifestEntry& v) {
  j = Json{{"path", v.path}, {"size", v.size}, {"digest", v.digest}};
}

void from_json(const Json& j, ManifestEntry& v) {
  v.path = Field<std::string>(j, "path");
  v.size = Field<std::uint64_t>(j, "size");
  v.digest = Field<std::string>(j, "digest");
}

void to_json(Json& j, const TransferReceipt& v) {
  j = Json{{"destination_path", v.destination_path},
           {"files", v.files},
           {"completed_at", v.completed_at},
           {"attempts", v.attempts}};
}

void from_json(const Json& j, TransferReceipt& v) {
  v.destination_path = Field<std::string>(j, "destination_path");
  v.files = Field<std::vector<ManifestEntry>>(j, "files");
  v.completed_at = Field<Ticks>(j, "completed_at");
  v.attempts = FieldOr<int>(j, "attempts", 1);
}

void to_json(Json& j, const Event& v) {
  j = Json{{"t", v.virtual_time},
           {"kind", SignalName(v.signal.kind)},
           {"source", v.source},
           {"payload", v.signal.payload}};
}

void from_json(const Json& j, Event& v) {
  v.virtual_time = Field<Ticks>(j, "t");
  auto kind = ParseSignalKind(Field<std::string>(j, "kind"));
  if (!kind) throw Error(ErrorCode::kParse, "unknown signal kind " + j["kind"].dump());
  v.signal.kind = *kind;
  v.signal.payload = j.value("payload", Json());
  v.source = Field<std::string>(j, "source");
}

void to_json(Json& j, const EventLog& v) { j = v.entries(); }

void from_json(const Json& j, EventLog& v) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "event log must be an array");
  EventLog log;
  for (const auto& entry : j) {
    auto e = entry.get<Event>();
    log = append_event(std::move(log), e.virtual_time, std::move(e.signal), std::move(e.source));
  }
  v = std::move(log);
}

void to_json(Json& j, const Job& v) {
  Json iteration = Json::object();
  for (const auto& [task, count] : v.iteration) iteration[std::to_string(task)] = count;
  j = Json{{"job_id", v.job_id},
           {"definition", v.definition},
           {"data_input", v.data_input},
           {"user_req_vm", v.user_req_vm},
           {"state", v.state},
           {"vm_pool", v.vm_pool},
           {"iteration", iteration},
           {"event_log", v.event_log},
           {"outcome", Opt(v.outcome)},
           {"destination", v.destination},
           {"sweep_binding", v.sweep_binding},
           {"data_output", Opt(v.data_output)},
           {"receipt", Opt(v.receipt)}};
}

void from_json(const Json& j, Job& v) {
  v.job_id = Field<std::string>(j, "job_id");
  v.definition = Field<SCDefinition>(j, "definition");
  v.data_input = FieldOr<ScalarMap>(j, "data_input", {});
  v.user_req_vm = Field<UserReqVM>(j, "user_req_vm");
  v.state = Field<JobState>(j, "state");
  v.vm_pool = FieldOr<std::vector<std::string>>(j, "vm_pool", {});
  v.iteration.clear();
  if (j.contains("iteration") && j["iteration"].is_object()) {
    for (const auto& [task, count] : j["iteration"].items()) {
      try {
        v.iteration[std::stoi(task)] = count.get<int>();
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParse, "bad iteration entry '" + task + "'");
      }
    }
  }
  v.event_log = FieldOr<EventLog>(j, "event_log", {});
  v.outcome = OptField<Outcome>(j, "outcome");
  v.destination = FieldOr<std::string>(j, "destination", "");
  v.sweep_binding = FieldOr<ScalarMap>(j, "sweep_binding", {});
  v.data_output = OptField<DataOutput>(j, "data_output");
  v.receipt = OptField<TransferReceipt>(j, "receipt");
}

void to_json(Json& j, const CostModel& v) {
  j = Json{{"data_check", v.data_check},
           {"vm_create_attempt", v.vm_create_attempt},
           {"bootstrap", v.bootstrap},
           {"task_iteration", v.task_iteration},
           {"task_iteration_default", v.task_iteration_default},
           {"transfer", v.transfer},
           {"cleanup_per_vm", v.cleanup_per_vm}};
}

void from_json(const Json& j, CostModel& v) {
  v.data_check = FieldOr<Ticks>(j, "data_check", 0);
  v.vm_create_attempt = FieldOr<Ticks>(j, "vm_create_attempt", 0);
  v.bootstrap = FieldOr<Ticks>(j, "bootstrap", 0);
  v.task_iteration = FieldOr<std::vector<Ticks>>(j, "task_iteration", {});
  v.task_iteration_default = FieldOr<Ticks>(j, "task_iteration_default", 0);
  v.transfer = FieldOr<Ticks>(j, "transfer", 0);
  v.cleanup_per_vm = FieldOr<Ticks>(j, "cleanup_per_vm", 0);
}

std::string EventLogToJsonl(const EventLog& log) {
  std::string out;
  for (const auto& e : log.entries()) {
    out += Json(e).dump();
    out += '\n';
  }
  return out;
}

EventLog EventLogFromJsonl(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    if (nl == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "events.jsonl: line " + std::to_string(line_no + 1) +
                                         " is not LF-terminated");
    }
    auto line = text.substr(0, nl);
    text.remove_prefix(nl + 1);
    ++line_no;
    auto e = ParseJson(line, "events.jsonl").get<Event>();
    log = append_event(std::move(log), e.virtual_time, std::move(e.signal), std::move(e.source));
  }
  return log;
}

}  // namespace sconn

namespace nlohmann {

void adl_serializer<sconn::Scalar>::to_json(json& j, const sconn::Scalar& v) {
  std::visit([&j](const auto& x) { j = x; }, v);
}

void adl_serializer<sconn::Scalar>::from_json(const json& j, sconn::Scalar& v) {
  using sconn::Error;
  using sconn::ErrorCode;
  if (j.is_boolean()) {
    v = j.get<bool>();
  } else if (j.is_number_integer()) {
    v = j.get<std::int64_t>();
  } else if (j.is_number_float()) {
    v = j.get<double>();
  } else if (j.is_string()) {
    v = j.get<std::string>();
  } else {
    throw Error(ErrorCode::kParse, "scalar must be bool, number or string, got " + j.dump());
  }
}

}  // namespace nlohmann
