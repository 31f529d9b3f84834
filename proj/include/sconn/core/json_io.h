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

#ifndef SCONN_CORE_JSON_IO_H_
#define SCONN_CORE_JSON_IO_H_

#include <string>
#include <string_view>

#include "sconn/core/types.h"

// JSON mapping of the domain types. Field names follow the C++ members;
// enums use the snake_case names from EnumName(). Events use the compact
// {t, kind, source, payload} shape shared with events.jsonl. The full schema
// is documented in docs/schema.md.

namespace sconn {

void to_json(Json& j, const Signal& v);
void from_json(const Json& j, Signal& v);
void to_json(Json& j, const FieldRule& v);
void from_json(const Json& j, FieldRule& v);
void to_json(Json& j, const SemanticRule& v);
void from_json(const Json& j, SemanticRule& v);
void to_json(Json& j, const DataConstraints& v);
void from_json(const Json& j, DataConstraints& v);
void to_json(Json& j, const ExecParamVM& v);
void from_json(const Json& j, ExecParamVM& v);
void to_json(Json& j, const ConvergenceCriterion& v);
void from_json(const Json& j, ConvergenceCriterion& v);
void to_json(Json& j, const SchedulingConstraints& v);
void from_json(const Json& j, SchedulingConstraints& v);
void to_json(Json& j, const ExecParamT& v);
void from_json(const Json& j, ExecParamT& v);
void to_json(Json& j, const TaskCodeRef& v);
void from_json(const Json& j, TaskCodeRef& v);
void to_json(Json& j, const SweepSpec& v);
void from_json(const Json& j, SweepSpec& v);
void to_json(Json& j, const SCDefinition& v);
void from_json(const Json& j, SCDefinition& v);
void to_json(Json& j, const UserReqVM& v);
void from_json(const Json& j, UserReqVM& v);
void to_json(Json& j, const Outcome& v);
void from_json(const Json& j, Outcome& v);
void to_json(Json& j, const OutputRecord& v);
void from_json(const Json& j, OutputRecord& v);
void to_json(Json& j, const TaskSummary& v);
void from_json(const Json& j, TaskSummary& v);
void to_json(Json& j, const DataOutput& v);
void from_json(const Json& j, DataOutput& v);
void to_json(Json& j, const ManifestEntry& v);
void from_json(const Json& j, ManifestEntry& v);
void to_json(Json& j, const TransferReceipt& v);
void from_json(const Json& j, TransferReceipt& v);
void to_json(Json& j, const Event& v);
void from_json(const Json& j, Event& v);
void to_json(Json& j, const EventLog& v);
void from_json(const Json& j, EventLog& v);
void to_json(Json& j, const Job& v);
void from_json(const Json& j, Job& v);
void to_json(Json& j, const CostModel& v);
void from_json(const Json& j, CostModel& v);

void to_json(Json& j, JobState v);
void from_json(const Json& j, JobState& v);
void to_json(Json& j, OutcomeKind v);
void from_json(const Json& j, OutcomeKind& v);

// events.jsonl: one compact JSON event per line, LF-terminated.
std::string EventLogToJsonl(const EventLog& log);
// Re-validates monotonicity and terminal closure while rebuilding.
EventLog EventLogFromJsonl(std::string_view text);

// Parses JSON text, mapping syntax errors to Error(kParse).
Json ParseJson(std::string_view text, std::string_view what);

}  // namespace sconn

#endif  // SCONN_CORE_JSON_IO_H_
