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

#ifndef SCONN_CLOUD_FAULT_PLAN_H_
#define SCONN_CLOUD_FAULT_PLAN_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sconn/core/types.h"

namespace sconn {

enum class PlanOutcome { kOk, kFail };

// The plan-consuming operation kinds. `kTaskStep` covers task-code steps run
// through run_remote; bootstrap steps have their own queue.
enum class FaultKind { kCreateVm, kBootstrapStep, kTaskStep, kTransfer };

inline constexpr std::array<FaultKind, 4> kAllFaultKinds = {
    FaultKind::kCreateVm, FaultKind::kBootstrapStep, FaultKind::kTaskStep, FaultKind::kTransfer};

std::string_view FaultKindName(FaultKind kind);  // "create_vm", "bootstrap_step", ...

struct ReachabilityLoss {
  std::string vm;
  Ticks from = 0;

  bool operator==(const ReachabilityLoss&) const = default;
};

struct SeededRates {
  double p_create_fail = 0.0;
  double p_bootstrap_fail = 0.0;
  double p_task_fail = 0.0;
  double p_transfer_fail = 0.0;
  double p_loss = 0.0;        // per created VM
  Ticks loss_window = 16;     // loss tick drawn uniformly from [0, loss_window]

  bool operator==(const SeededRates&) const = default;
};

// A scripted or seeded schedule of provider failures.
//
// Scripted queues are consumed front to back; an exhausted queue yields Ok.
// Seeded mode draws every outcome from per-kind std::mt19937_64 streams (see
// FaultSource), so a (seed, rates) pair replays identically.
struct FaultPlan {
  enum class Mode { kScripted, kSeeded };

  Mode mode = Mode::kScripted;
  std::vector<PlanOutcome> create_vm;
  std::vector<PlanOutcome> bootstrap_step;
  std::vector<PlanOutcome> task_step;
  std::vector<PlanOutcome> transfer;
  std::vector<ReachabilityLoss> reachability;
  std::uint64_t seed = 0;
  SeededRates rates;

  const std::vector<PlanOutcome>& queue(FaultKind kind) const;
  std::vector<PlanOutcome>& queue(FaultKind kind);

  static FaultPlan AllOk() { return {}; }
  static FaultPlan Seeded(std::uint64_t seed, SeededRates rates);

  bool operator==(const FaultPlan&) const = default;
};

void to_json(Json& j, const FaultPlan& v);
void from_json(const Json& j, FaultPlan& v);  // throws Error(kParse)

FaultPlan LoadFaultPlan(const std::string& path);

struct PlanDraw {
  PlanOutcome outcome = PlanOutcome::kOk;
  std::size_t position = 0;  // 0-based index within the kind's sequence
};

// Cursor over a FaultPlan. Records every outcome it hands out, so a seeded run
// can be turned back into the scripted plan that reproduces it.
class FaultSource {
 public:
  explicit FaultSource(FaultPlan plan);

  PlanDraw Next(FaultKind kind);

  // Called once per created VM; seeded mode decides its loss here.
  void RegisterVm(const std::string& vm_id);

  // Earliest tick from which `vm_id` is unreachable, if ever.
  std::optional<Ticks> LossTick(const std::string& vm_id) const;

  std::size_t consumed(FaultKind kind) const;
  const FaultPlan& plan() const { return plan_; }

  // Scripted plan realizing exactly the outcomes drawn so far.
  FaultPlan Realized() const;

 private:
  double Uniform(std::mt19937_64& stream);

  FaultPlan plan_;
  std::array<std::size_t, 4> cursor_{};
  std::array<std::vector<PlanOutcome>, 4> drawn_;
  std::array<std::mt19937_64, 4> streams_;
  std::mt19937_64 loss_stream_;
  std::map<std::string, Ticks> losses_;
  std::vector<ReachabilityLoss> realized_losses_;
};

}  // namespace sconn

#endif  // SCONN_CLOUD_FAULT_PLAN_H_
