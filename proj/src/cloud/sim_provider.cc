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

#include "sconn/cloud/sim_provider.h"

#include <algorithm>

#include "sconn/core/error.h"

namespace sconn {

std::string_view EnumName(VmLifecycle v) {
  switch (v) {
    case VmLifecycle::kRequested: return "requested";
    case VmLifecycle::kCreated: return "created";
    case VmLifecycle::kBootstrapped: return "bootstrapped";
    case VmLifecycle::kUnreachable: return "unreachable";
    case VmLifecycle::kDestroyed: return "destroyed";
  }
  return "?";
}

std::vector<CreateResult> Provider::CreateVmsBlock(int n) {
  if (n < 1) throw Error(ErrorCode::kContractViolation, "block request needs n >= 1");
  std::vector<CreateResult> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(CreateVm());
  return out;
}

SimulatedProvider::SimulatedProvider(FaultSource& faults) : faults_(faults) {}

VmRecord& SimulatedProvider::Find(const std::string& vm_id) {
  auto it = vms_.find(vm_id);
  if (it == vms_.end()) throw Error(ErrorCode::kUnknownVm, "unknown vm '" + vm_id + "'");
  return it->second;
}

const VmRecord& SimulatedProvider::Find(const std::string& vm_id) const {
  auto it = vms_.find(vm_id);
  if (it == vms_.end()) throw Error(ErrorCode::kUnknownVm, "unknown vm '" + vm_id + "'");
  return it->second;
}

CreateResult SimulatedProvider::CreateVm() {
  ++create_calls_;
  const PlanDraw draw = faults_.Next(FaultKind::kCreateVm);
  if (draw.outcome == PlanOutcome::kFail) return CreationFailure{draw.position};
  VmRecord record{"vm-" + std::to_string(next_id_++), VmLifecycle::kCreated, {}};
  faults_.RegisterVm(record.vm_id);
  vms_[record.vm_id] = record;
  return record;
}

VmRecord SimulatedProvider::DestroyVm(const std::string& vm_id) {
  VmRecord& record = Find(vm_id);
  record.lifecycle = VmLifecycle::kDestroyed;
  record.hosted_processes.clear();
  return record;
}

bool SimulatedProvider::IsReachable(const std::string& vm_id, Ticks now) {
  VmRecord& record = Find(vm_id);
  if (record.lifecycle == VmLifecycle::kDestroyed) {
    throw Error(ErrorCode::kContractViolation, "reachability query on destroyed " + vm_id);
  }
  const auto loss = faults_.LossTick(vm_id);
  const bool reachable = !(loss && *loss <= now);
  if (!reachable) record.lifecycle = VmLifecycle::kUnreachable;
  return reachable;
}

StepResult SimulatedProvider::RunRemote(const std::string& vm_id, const RemoteStep& step,
                                        Ticks now) {
  const VmRecord& record = Find(vm_id);
  if (record.lifecycle == VmLifecycle::kDestroyed || record.lifecycle == VmLifecycle::kRequested) {
    throw Error(ErrorCode::kContractViolation,
                "run_remote on " + vm_id + " in state " + std::string(EnumName(record.lifecycle)));
  }
  RemoteCall call{vm_id, step.kind, step.label, step.process_id, now, StepResult::Status::kOk};
  StepResult result;
  if (!IsReachable(vm_id, now)) {
    result.status = StepResult::Status::kVmUnreachable;
    result.detail = vm_id + " unreachable at t=" + std::to_string(now);
  } else {
    const auto kind = step.kind == StepKind::kBootstrap ? FaultKind::kBootstrapStep
                                                        : FaultKind::kTaskStep;
    const PlanDraw draw = faults_.Next(kind);
    if (draw.outcome == PlanOutcome::kFail) {
      result.status = StepResult::Status::kStepFailed;
      result.detail = "injected " + std::string(FaultKindName(kind)) + " failure at plan position " +
                      std::to_string(draw.position);
    } else if (step.work) {
      try {
        result.output = step.work();
      } catch (const Error& e) {
        result.status = StepResult::Status::kStepFailed;
        result.detail = e.what();
      }
    }
  }
  call.status = result.status;
  remote_calls_.push_back(std::move(call));
  return result;
}

VmRecord SimulatedProvider::Record(const std::string& vm_id) const { return Find(vm_id); }

void SimulatedProvider::MarkBootstrapped(const std::string& vm_id) {
  VmRecord& record = Find(vm_id);
  if (record.lifecycle != VmLifecycle::kCreated) {
    throw Error(ErrorCode::kContractViolation,
                "cannot bootstrap " + vm_id + " in state " + std::string(EnumName(record.lifecycle)));
  }
  record.lifecycle = VmLifecycle::kBootstrapped;
}

void SimulatedProvider::AttachProcess(const std::string& vm_id, const std::string& process_id) {
  VmRecord& record = Find(vm_id);
  if (record.lifecycle != VmLifecycle::kBootstrapped &&
      record.lifecycle != VmLifecycle::kUnreachable) {
    throw Error(ErrorCode::kContractViolation,
                "cannot host processes on " + vm_id + " in state " +
                    std::string(EnumName(record.lifecycle)));
  }
  auto& hosted = record.hosted_processes;
  if (std::find(hosted.begin(), hosted.end(), process_id) == hosted.end()) {
    hosted.push_back(process_id);
  }
}

std::vector<std::string> SimulatedProvider::vm_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, record] : vms_) out.push_back(id);
  std::sort(out.begin(), out.end(), IdLess{});
  return out;
}

bool SimulatedProvider::AllDestroyed() const {
  return std::all_of(vms_.begin(), vms_.end(), [](const auto& kv) {
    return kv.second.lifecycle == VmLifecycle::kDestroyed;
  });
}

}  // namespace sconn
