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

#ifndef SCONN_CORE_DEFINITION_H_
#define SCONN_CORE_DEFINITION_H_

#include <string>
#include <vector>

#include "sconn/core/types.h"

namespace sconn {

// Every structural invariant violation of `def`, in a stable order. An empty
// result means the definition is valid.
std::vector<std::string> validate_definition(const SCDefinition& def);

// Upper bound on a job's virtual duration: the phases of the workflow compose
// sequentially, each charged its worst case.
//
//   data_check
//   + (1 + retry_limit) * vm_create_attempt
//   + bootstrap
//   + sum_k max_iterations_k * task_iteration_k
//   + transfer
//   + iN * cleanup_per_vm
//
// Throws kInvalidDefinition if `def` does not validate.
Ticks wcet_bound(const SCDefinition& def, const UserReqVM& req, const CostModel& cost);

}  // namespace sconn

#endif  // SCONN_CORE_DEFINITION_H_
