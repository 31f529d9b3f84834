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

#include "sconn/core/types.h"

#include <charconv>
#include <cmath>
#include <system_error>

#include "sconn/core/error.h"

namespace sconn {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kContractViolation: return "ContractViolation";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kTimeRegression: return "TimeRegression";
    case ErrorCode::kAppendAfterTerminal: return "AppendAfterTerminal";
    case ErrorCode::kInvalidDefinition: return "InvalidDefinition";
    case ErrorCode::kUnknownVm: return "UnknownVm";
    case ErrorCode::kUnsatisfiableConstraint: return "UnsatisfiableConstraint";
    case ErrorCode::kMissingMetric: return "MissingMetric";
    case ErrorCode::kStepOnCompleted: return "StepOnCompleted";
    case ErrorCode::kUnknownJob: return "UnknownJob";
    case ErrorCode::kCorruptRecord: return "CorruptRecord";
    case ErrorCode::kDuplicateDataset: return "DuplicateDataset";
  }
  return "Unknown";
}

std::optional<double> AsNumber(const Scalar& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::nullopt;
}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, end);
}

bool IdLess::operator()(std::string_view a, std::string_view b) const {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      // Strip leading zeros, then longer runs are larger.
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      if (ie - is != je - js) return ie - is < je - js;
      if (int c = a.substr(is, ie - is).compare(b.substr(js, je - js)); c != 0) return c < 0;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

std::string ScalarToString(const Scalar& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return FormatNumber(v);
        } else {
          return v;
        }
      },
      value);
}

namespace {

constexpr std::array<std::string_view, 9> kSignalNames = {
    "scStart",       "dataCheckOk",       "dataCheckFail",
    "vmFail",        "execStart",         "execFailed",
    "transferStart", "transferCompleted", "scCompleted",
};

std::string_view OpSymbol(CompareOp op) {
  switch (op) {
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
    case CompareOp::kEq: return "==";
    case CompareOp::kNe: return "!=";
  }
  return "?";
}

}  // namespace

std::string_view SignalName(SignalKind kind) {
  return kSignalNames[static_cast<std::size_t>(kind)];
}

std::optional<SignalKind> ParseSignalKind(std::string_view name) {
  for (std::size_t i = 0; i < kSignalNames.size(); ++i) {
    if (kSignalNames[i] == name) return kAllSignalKinds[i];
  }
  return std::nullopt;
}

std::string SemanticRule::Describe() const {
  std::string out = field;
  out += ' ';
  out += OpSymbol(op);
  out += ' ';
  if (value) {
    out += FormatNumber(*value);
  } else if (other_field) {
    out += *other_field;
  } else {
    out += "<missing>";
  }
  return out;
}

bool EventLog::completed() const {
  return !entries_.empty() && entries_.back().signal.kind == SignalKind::kScCompleted;
}

std::vector<SignalKind> EventLog::kinds() const {
  std::vector<SignalKind> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.signal.kind);
  return out;
}

EventLog append_event(EventLog log, Ticks time, Signal signal, std::string source) {
  if (time < 0) {
    throw Error(ErrorCode::kTimeRegression, "negative virtual time " + std::to_string(time));
  }
  if (log.completed()) {
    throw Error(ErrorCode::kAppendAfterTerminal,
                "cannot append " + std::string(SignalName(signal.kind)) + " after scCompleted");
  }
  if (!log.entries_.empty() && time < log.entries_.back().virtual_time) {
    throw Error(ErrorCode::kTimeRegression,
                "event at t=" + std::to_string(time) + " precedes last entry at t=" +
                    std::to_string(log.entries_.back().virtual_time));
  }
  log.entries_.push_back(Event{time, std::move(signal), std::move(source)});
  return log;
}

CostModel CostModel::Uniform(Ticks cost) {
  CostModel m;
  m.data_check = cost;
  m.vm_create_attempt = cost;
  m.bootstrap = cost;
  m.task_iteration_default = cost;
  m.transfer = cost;
  m.cleanup_per_vm = cost;
  return m;
}

std::string_view EnumName(ScalarType v) {
  switch (v) {
    case ScalarType::kBool: return "bool";
    case ScalarType::kInt: return "int";
    case ScalarType::kReal: return "real";
    case ScalarType::kString: return "string";
  }
  return "?";
}

std::string_view EnumName(CompareOp v) { return OpSymbol(v); }

std::string_view EnumName(RetryStrategy v) {
  return v == RetryStrategy::kBlock ? "block" : "single";
}

std::string_view EnumName(Direction v) { return v == Direction::kBelow ? "below" : "above"; }

std::string_view EnumName(FtStrategy v) {
  return v == FtStrategy::kAbandonAndCollect ? "abandon_and_collect" : "rerun_elsewhere";
}

std::string_view EnumName(TaskCodeKind v) {
  switch (v) {
    case TaskCodeKind::kBuiltinArithmetic: return "builtin_arithmetic";
    case TaskCodeKind::kBuiltinContraction: return "builtin_contraction";
    case TaskCodeKind::kExternalCommand: return "external_command";
  }
  return "?";
}

std::string_view EnumName(JobState v) {
  switch (v) {
    case JobState::kCreated: return "created";
    case JobState::kDataChecking: return "data_checking";
    case JobState::kEnvSetup: return "env_setup";
    case JobState::kExecuting: return "executing";
    case JobState::kTransferring: return "transferring";
    case JobState::kCleaningUp: return "cleaning_up";
    case JobState::kCompleted: return "completed";
  }
  return "?";
}

std::string_view EnumName(OutcomeKind v) {
  switch (v) {
    case OutcomeKind::kSuccess: return "success";
    case OutcomeKind::kDataCheckFailed: return "data_check_failed";
    case OutcomeKind::kVmFailed: return "vm_failed";
    case OutcomeKind::kExecFailed: return "exec_failed";
  }
  return "?";
}

std::string_view DisplayName(JobState v) {
  switch (v) {
    case JobState::kCreated: return "Created";
    case JobState::kDataChecking: return "DataChecking";
    case JobState::kEnvSetup: return "EnvSetup";
    case JobState::kExecuting: return "Executing";
    case JobState::kTransferring: return "Transferring";
    case JobState::kCleaningUp: return "CleaningUp";
    case JobState::kCompleted: return "Completed";
  }
  return "?";
}

std::string_view DisplayName(OutcomeKind v) {
  switch (v) {
    case OutcomeKind::kSuccess: return "Success";
    case OutcomeKind::kDataCheckFailed: return "DataCheckFailed";
    case OutcomeKind::kVmFailed: return "VmFailed";
    case OutcomeKind::kExecFailed: return "ExecFailed";
  }
  return "?";
}

}  // namespace sconn
