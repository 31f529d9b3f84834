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

#ifndef SCONN_SWEEP_SWEEP_H_
#define SCONN_SWEEP_SWEEP_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sconn/core/types.h"
#include "sconn/engine/engine.h"
#include "sconn/store/store.h"

namespace sconn {

struct SweepBinding {
  std::string binding_id;  // "b0", "b1", ...
  ScalarMap values;

  bool operator==(const SweepBinding&) const = default;
};

// Cartesian product. Variables are taken in name order and the first one
// varies slowest; within a variable, values keep their listed order. An
// empty spec yields one empty binding.
std::vector<SweepBinding> expand_sweep(const SweepSpec& spec);

// Binding values win over base input entries of the same name.
ScalarMap ApplyBinding(const ScalarMap& base, const SweepBinding& binding);

// Builds the isolated simulated environment for the index-th job.
using EnvFactory = std::function<std::unique_ptr<SimulatedRun>(std::size_t index)>;

struct SweepLaunch {
  std::vector<std::string> job_ids;  // binding order
  std::vector<Job> jobs;
  std::vector<SweepBinding> bindings;
};

// One job per binding, run to completion in binding order, each against its
// own environment. `curation` (optional) receives successful jobs;
// `on_step` sees every job after every step. Throws kInvalidDefinition
// before any job starts.
SweepLaunch launch_sweep(const SCDefinition& def, const ScalarMap& base_input,
                         const UserReqVM& req, const EnvFactory& env_factory, JobIdSource& ids,
                         const std::string& destination = "", CurationIndex* curation = nullptr,
                         const std::function<void(const Job&)>& on_step = {});

}  // namespace sconn

#endif  // SCONN_SWEEP_SWEEP_H_
