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

#ifndef SCONN_CLOUD_PROVIDER_H_
#define SCONN_CLOUD_PROVIDER_H_

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "sconn/core/types.h"

namespace sconn {

enum class VmLifecycle { kRequested, kCreated, kBootstrapped, kUnreachable, kDestroyed };

std::string_view EnumName(VmLifecycle v);

struct VmRecord {
  std::string vm_id;
  VmLifecycle lifecycle = VmLifecycle::kRequested;
  std::vector<std::string> hosted_processes;

  bool operator==(const VmRecord&) const = default;
};

struct CreationFailure {
  std::size_t plan_position = 0;

  bool operator==(const CreationFailure&) const = default;
};

using CreateResult = std::variant<VmRecord, CreationFailure>;

enum class StepKind { kBootstrap, kTask };

// A unit of remote work. `work` produces the step's output when the provider
// lets the step succeed; an Error thrown from it is reported as StepFailed.
struct RemoteStep {
  StepKind kind = StepKind::kTask;
  std::string label;
  std::string process_id;  // empty for bootstrap steps
  std::function<Json()> work;
};

struct StepResult {
  enum class Status { kOk, kVmUnreachable, kStepFailed };

  Status status = Status::kOk;
  Json output;
  std::string detail;
};

// The infrastructure-as-a-service surface the engine drives on the user's
// behalf. Callers serialize access; implementations need not be thread-safe.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual CreateResult CreateVm() = 0;
  // Exactly n outcomes, in plan order; partial success is possible.
  virtual std::vector<CreateResult> CreateVmsBlock(int n);
  // Idempotent. Throws kUnknownVm for ids never issued.
  virtual VmRecord DestroyVm(const std::string& vm_id) = 0;
  virtual bool IsReachable(const std::string& vm_id, Ticks now) = 0;
  virtual StepResult RunRemote(const std::string& vm_id, const RemoteStep& step, Ticks now) = 0;

  virtual VmRecord Record(const std::string& vm_id) const = 0;
  virtual void MarkBootstrapped(const std::string& vm_id) = 0;
  virtual void AttachProcess(const std::string& vm_id, const std::string& process_id) = 0;
};

}  // namespace sconn

#endif  // SCONN_CLOUD_PROVIDER_H_
