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

#ifndef SCONN_VMENV_VM_ENV_H_
#define SCONN_VMENV_VM_ENV_H_

#include <span>
#include <string>
#include <vector>

#include "sconn/cloud/provider.h"
#include "sconn/core/types.h"

namespace sconn {

// mN <= generated <= iN. Throws kContractViolation unless 1 <= mN <= iN and
// generated >= 0.
bool check_allocation(int ideal, int minimal, int generated_count);

enum class Sufficiency { kSufficient, kInsufficient };

struct AcquisitionResult {
  std::vector<std::string> generated_vm;
  int attempts_used = 0;  // retry rounds; the initial request is not counted
  Sufficiency verdict = Sufficiency::kInsufficient;

  bool operator==(const AcquisitionResult&) const = default;
};

// One block request for iN VMs; if fewer than mN arrive, up to retry_limit
// retry rounds top the pool up to mN (never to iN). Block retries request the
// whole shortfall; Single retries request one VM per round.
AcquisitionResult acquire_vms(Provider& provider, const UserReqVM& req, const ExecParamVM& param,
                              Ticks now);

struct BootstrapResult {
  bool all_ready = false;
  std::string failed_vm;
  int failed_step = 0;  // 1-based within the VM's step sequence
  std::string reason;   // "unreachable" or the step failure detail
};

// Per VM: bootstrap_step_count base steps followed by one install step per
// compiler. Stops at the first failed or unreachable step.
BootstrapResult bootstrap(Provider& provider, std::span<const std::string> vms,
                          const ExecParamVM& param, Ticks now);

struct CleanupReport {
  std::vector<std::string> destroyed;
  Ticks time = 0;
};

// Destroys every listed VM that is not already Destroyed. `time` is `now`
// plus cost_per_vm for each VM this call actually destroyed.
CleanupReport cleanup(Provider& provider, std::span<const std::string> vms, Ticks now,
                      Ticks cost_per_vm = 0);

}  // namespace sconn

#endif  // SCONN_VMENV_VM_ENV_H_
