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

#include "sconn/sweep/sweep.h"

#include "sconn/core/definition.h"
#include "sconn/core/error.h"

namespace sconn {

std::vector<SweepBinding> expand_sweep(const SweepSpec& spec) {
  std::vector<const std::string*> names;
  std::vector<const std::vector<Scalar>*> lists;
  std::size_t total = 1;
  for (const auto& [name, values] : spec.variables) {
    names.push_back(&name);
    lists.push_back(&values);
    total *= values.size();
  }
  std::vector<SweepBinding> out;
  out.reserve(total);
  std::vector<std::size_t> digit(names.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    SweepBinding b;
    b.binding_id = "b" + std::to_string(n);
    for (std::size_t v = 0; v < names.size(); ++v) b.values[*names[v]] = (*lists[v])[digit[v]];
    out.push_back(std::move(b));
    // Odometer: the last variable turns fastest.
    for (std::size_t v = names.size(); v-- > 0;) {
      if (++digit[v] < lists[v]->size()) break;
      digit[v] = 0;
    }
  }
  return out;
}

ScalarMap ApplyBinding(const ScalarMap& base, const SweepBinding& binding) {
  ScalarMap out = base;
  for (const auto& [name, value] : binding.values) out[name] = value;
  return out;
}

SweepLaunch launch_sweep(const SCDefinition& def, const ScalarMap& base_input,
                         const UserReqVM& req, const EnvFactory& env_factory, JobIdSource& ids,
                         const std::string& destination, CurationIndex* curation,
                         const std::function<void(const Job&)>& on_step) {
  const auto violations = validate_definition(def);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    throw Error(ErrorCode::kInvalidDefinition, msg);
  }
  if (!req.valid()) throw Error(ErrorCode::kInvalidArgument, "invalid VM request");

  SweepLaunch launch;
  launch.bindings = expand_sweep(def.sweep);
  for (std::size_t i = 0; i < launch.bindings.size(); ++i) {
    const SweepBinding& b = launch.bindings[i];
    std::unique_ptr<SimulatedRun> run = env_factory(i);
    Environment& env = run->env();
    env.curation = curation;
    Job job = start_job(def, ApplyBinding(base_input, b), req, destination, ids);
    job.sweep_binding = b.values;
    if (on_step) on_step(job);
    job = run_to_completion(std::move(job), env, on_step);
    launch.job_ids.push_back(job.job_id);
    launch.jobs.push_back(std::move(job));
  }
  return launch;
}

}  // namespace sconn
