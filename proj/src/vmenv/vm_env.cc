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

#include "sconn/vmenv/vm_env.h"

#include <algorithm>

#include "sconn/core/error.h"

namespace sconn {
namespace {

void Collect(const std::vector<CreateResult>& outcomes, std::vector<std::string>& pool) {
  for (const auto& outcome : outcomes) {
    if (const auto* vm = std::get_if<VmRecord>(&outcome)) pool.push_back(vm->vm_id);
  }
}

}  // namespace

bool check_allocation(int ideal, int minimal, int generated_count) {
  if (minimal < 1 || minimal > ideal) {
    throw Error(ErrorCode::kContractViolation,
                "invalid (iN, mN) = (" + std::to_string(ideal) + ", " + std::to_string(minimal) + ")");
  }
  if (generated_count < 0) {
    throw Error(ErrorCode::kContractViolation, "negative generated VM count");
  }
  return minimal <= generated_count && generated_count <= ideal;
}

AcquisitionResult acquire_vms(Provider& provider, const UserReqVM& req, const ExecParamVM& param,
                              Ticks /*now*/) {
  if (!req.valid()) {
    throw Error(ErrorCode::kContractViolation, "invalid user VM request");
  }
  AcquisitionResult result;
  Collect(provider.CreateVmsBlock(req.ideal), result.generated_vm);

  auto have = [&] { return static_cast<int>(result.generated_vm.size()); };
  while (have() < req.minimal && result.attempts_used < param.retry_limit) {
    ++result.attempts_used;
    if (param.retry_strategy == RetryStrategy::kBlock) {
      Collect(provider.CreateVmsBlock(req.minimal - have()), result.generated_vm);
    } else {
      Collect({provider.CreateVm()}, result.generated_vm);
    }
  }
  result.verdict = check_allocation(req.ideal, req.minimal, have()) ? Sufficiency::kSufficient
                                                                    : Sufficiency::kInsufficient;
  return result;
}

BootstrapResult bootstrap(Provider& provider, std::span<const std::string> vms,
                          const ExecParamVM& param, Ticks now) {
  for (const auto& vm : vms) {
    if (provider.Record(vm).lifecycle != VmLifecycle::kCreated) {
      throw Error(ErrorCode::kContractViolation, "bootstrap expects " + vm + " in state created");
    }
  }
  std::vector<std::string> labels;
  for (int s = 1; s <= param.bootstrap_step_count; ++s) {
    labels.push_back("base step " + std::to_string(s));
  }
  for (const auto& compiler : param.compilers) labels.push_back("install " + compiler);

  std::vector<std::string> order(vms.begin(), vms.end());
  std::sort(order.begin(), order.end(), IdLess{});
  for (const auto& vm : order) {
    for (std::size_t s = 0; s < labels.size(); ++s) {
      RemoteStep step{StepKind::kBootstrap, "bootstrap " + vm + ": " + labels[s], "", {}};
      StepResult r = provider.RunRemote(vm, step, now);
      if (r.status == StepResult::Status::kOk) continue;
      BootstrapResult failed;
      failed.failed_vm = vm;
      failed.failed_step = static_cast<int>(s) + 1;
      failed.reason = r.status == StepResult::Status::kVmUnreachable ? "unreachable" : r.detail;
      return failed;
    }
  }
  for (const auto& vm : order) provider.MarkBootstrapped(vm);
  return BootstrapResult{true, "", 0, ""};
}

CleanupReport cleanup(Provider& provider, std::span<const std::string> vms, Ticks now,
                      Ticks cost_per_vm) {
  CleanupReport report;
  report.time = now;
  std::vector<std::string> order(vms.begin(), vms.end());
  std::sort(order.begin(), order.end(), IdLess{});
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (const auto& vm : order) {
    if (provider.Record(vm).lifecycle != VmLifecycle::kDestroyed) report.time += cost_per_vm;
    provider.DestroyVm(vm);
    report.destroyed.push_back(vm);
  }
  return report;
}

}  // namespace sconn
