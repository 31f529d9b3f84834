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

#ifndef SCONN_CLOUD_SIM_PROVIDER_H_
#define SCONN_CLOUD_SIM_PROVIDER_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sconn/cloud/fault_plan.h"
#include "sconn/cloud/provider.h"

namespace sconn {

// One observed run_remote call, kept for post-hoc audits.
struct RemoteCall {
  std::string vm_id;
  StepKind kind = StepKind::kTask;
  std::string label;
  std::string process_id;
  Ticks now = 0;
  StepResult::Status status = StepResult::Status::kOk;
};

// Deterministic in-memory IaaS. VM ids are "vm-0", "vm-1", ... issued only on
// successful creation. Reachability loss is permanent.
class SimulatedProvider : public Provider {
 public:
  explicit SimulatedProvider(FaultSource& faults);

  CreateResult CreateVm() override;
  VmRecord DestroyVm(const std::string& vm_id) override;
  bool IsReachable(const std::string& vm_id, Ticks now) override;
  StepResult RunRemote(const std::string& vm_id, const RemoteStep& step, Ticks now) override;

  VmRecord Record(const std::string& vm_id) const override;
  void MarkBootstrapped(const std::string& vm_id) override;
  void AttachProcess(const std::string& vm_id, const std::string& process_id) override;

  std::size_t create_calls() const { return create_calls_; }
  const std::vector<RemoteCall>& remote_calls() const { return remote_calls_; }
  std::vector<std::string> vm_ids() const;
  // Every VM ever created is now Destroyed.
  bool AllDestroyed() const;

 private:
  VmRecord& Find(const std::string& vm_id);
  const VmRecord& Find(const std::string& vm_id) const;

  FaultSource& faults_;
  std::map<std::string, VmRecord> vms_;
  std::size_t next_id_ = 0;
  std::size_t create_calls_ = 0;
  std::vector<RemoteCall> remote_calls_;
};

}  // namespace sconn

#endif  // SCONN_CLOUD_SIM_PROVIDER_H_
