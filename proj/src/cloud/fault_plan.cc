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

#include "sconn/cloud/fault_plan.h"

#include <fstream>
#include <sstream>

#include "sconn/core/error.h"
#include "sconn/core/json_io.h"

namespace sconn {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t Index(FaultKind kind) { return static_cast<std::size_t>(kind); }

double Rate(const SeededRates& r, FaultKind kind) {
  switch (kind) {
    case FaultKind::kCreateVm: return r.p_create_fail;
    case FaultKind::kBootstrapStep: return r.p_bootstrap_fail;
    case FaultKind::kTaskStep: return r.p_task_fail;
    case FaultKind::kTransfer: return r.p_transfer_fail;
  }
  return 0.0;
}

std::vector<PlanOutcome> ParseQueue(const Json& j, FaultKind kind) {
  std::vector<PlanOutcome> out;
  const auto key = std::string(FaultKindName(kind));
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw Error(ErrorCode::kParse, key + " must be a list");
  for (const auto& item : j[key]) {
    if (item == "ok") {
      out.push_back(PlanOutcome::kOk);
    } else if (item == "fail") {
      out.push_back(PlanOutcome::kFail);
    } else {
      throw Error(ErrorCode::kParse, key + ": expected \"ok\" or \"fail\", got " + item.dump());
    }
  }
  return out;
}

double Probability(const Json& j, const char* key) {
  if (!j.contains(key)) return 0.0;
  if (!j[key].is_number()) throw Error(ErrorCode::kParse, std::string(key) + " must be a number");
  double p = j[key].get<double>();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kParse, std::string(key) + " must lie in [0, 1]");
  }
  return p;
}

}  // namespace

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kCreateVm: return "create_vm";
    case FaultKind::kBootstrapStep: return "bootstrap_step";
    case FaultKind::kTaskStep: return "task_step";
    case FaultKind::kTransfer: return "transfer";
  }
  return "?";
}

const std::vector<PlanOutcome>& FaultPlan::queue(FaultKind kind) const {
  switch (kind) {
    case FaultKind::kCreateVm: return create_vm;
    case FaultKind::kBootstrapStep: return bootstrap_step;
    case FaultKind::kTaskStep: return task_step;
    case FaultKind::kTransfer: return transfer;
  }
  return create_vm;
}

std::vector<PlanOutcome>& FaultPlan::queue(FaultKind kind) {
  return const_cast<std::vector<PlanOutcome>&>(std::as_const(*this).queue(kind));
}

FaultPlan FaultPlan::Seeded(std::uint64_t seed, SeededRates rates) {
  FaultPlan plan;
  plan.mode = Mode::kSeeded;
  plan.seed = seed;
  plan.rates = rates;
  return plan;
}

void to_json(Json& j, const FaultPlan& v) {
  if (v.mode == FaultPlan::Mode::kSeeded) {
    j = Json{{"mode", "seeded"},
             {"seed", v.seed},
             {"p_create_fail", v.rates.p_create_fail},
             {"p_bootstrap_fail", v.rates.p_bootstrap_fail},
             {"p_task_fail", v.rates.p_task_fail},
             {"p_transfer_fail", v.rates.p_transfer_fail},
             {"p_loss", v.rates.p_loss},
             {"loss_window", v.rates.loss_window}};
    return;
  }
  j = Json{{"mode", "scripted"}};
  for (FaultKind kind : kAllFaultKinds) {
    Json q = Json::array();
    for (PlanOutcome o : v.queue(kind)) q.push_back(o == PlanOutcome::kOk ? "ok" : "fail");
    j[std::string(FaultKindName(kind))] = q;
  }
  Json losses = Json::array();
  for (const auto& loss : v.reachability) losses.push_back(Json{{"vm", loss.vm}, {"from", loss.from}});
  j["reachability"] = losses;
}

void from_json(const Json& j, FaultPlan& v) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "fault plan must be an object");
  v = FaultPlan{};
  const auto mode = j.value("mode", std::string("scripted"));
  if (mode == "seeded") {
    v.mode = FaultPlan::Mode::kSeeded;
    if (!j.contains("seed") || !j["seed"].is_number_integer()) {
      throw Error(ErrorCode::kParse, "seeded fault plan needs an integer seed");
    }
    v.seed = j["seed"].get<std::uint64_t>();
    v.rates.p_create_fail = Probability(j, "p_create_fail");
    v.rates.p_bootstrap_fail = Probability(j, "p_bootstrap_fail");
    v.rates.p_task_fail = Probability(j, "p_task_fail");
    v.rates.p_transfer_fail = Probability(j, "p_transfer_fail");
    v.rates.p_loss = Probability(j, "p_loss");
    if (j.contains("loss_window")) {
      v.rates.loss_window = j["loss_window"].get<Ticks>();
      if (v.rates.loss_window < 0) throw Error(ErrorCode::kParse, "loss_window must be >= 0");
    }
    return;
  }
  if (mode != "scripted") throw Error(ErrorCode::kParse, "unknown fault plan mode '" + mode + "'");
  for (FaultKind kind : kAllFaultKinds) v.queue(kind) = ParseQueue(j, kind);
  if (j.contains("reachability")) {
    if (!j["reachability"].is_array()) throw Error(ErrorCode::kParse, "reachability must be a list");
    for (const auto& item : j["reachability"]) {
      if (!item.contains("vm") || !item["vm"].is_string() || !item.contains("from") ||
          !item["from"].is_number_integer()) {
        throw Error(ErrorCode::kParse, "reachability entries need {\"vm\", \"from\"}");
      }
      auto from = item["from"].get<Ticks>();
      if (from < 0) throw Error(ErrorCode::kParse, "reachability 'from' must be >= 0");
      v.reachability.push_back({item["vm"].get<std::string>(), from});
    }
  }
}

FaultPlan LoadFaultPlan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open fault plan " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseJson(ss.str(), "fault plan " + path).get<FaultPlan>();
}

FaultSource::FaultSource(FaultPlan plan) : plan_(std::move(plan)) {
  for (std::size_t k = 0; k < streams_.size(); ++k) {
    streams_[k].seed(SplitMix64(plan_.seed + 0x100 * (k + 1)));
  }
  loss_stream_.seed(SplitMix64(plan_.seed + 0x100 * (streams_.size() + 1)));
}

double FaultSource::Uniform(std::mt19937_64& stream) {
  // Top 53 bits, so the value is exact and independent of <random>
  // distribution implementations.
  return static_cast<double>(stream() >> 11) * 0x1.0p-53;
}

PlanDraw FaultSource::Next(FaultKind kind) {
  const std::size_t k = Index(kind);
  PlanDraw draw;
  draw.position = cursor_[k]++;
  if (plan_.mode == FaultPlan::Mode::kSeeded) {
    draw.outcome = Uniform(streams_[k]) < Rate(plan_.rates, kind) ? PlanOutcome::kFail
                                                                    : PlanOutcome::kOk;
  } else {
    const auto& q = plan_.queue(kind);
    draw.outcome = draw.position < q.size() ? q[draw.position] : PlanOutcome::kOk;
  }
  drawn_[k].push_back(draw.outcome);
  return draw;
}

void FaultSource::RegisterVm(const std::string& vm_id) {
  if (losses_.count(vm_id) != 0) return;
  std::optional<Ticks> tick;
  if (plan_.mode == FaultPlan::Mode::kSeeded) {
    // Always consume two draws per VM so later VMs see the same stream.
    const double u = Uniform(loss_stream_);
    const Ticks offset =
        static_cast<Ticks>(loss_stream_() % static_cast<std::uint64_t>(plan_.rates.loss_window + 1));
    if (u < plan_.rates.p_loss) tick = offset;
  } else {
    for (const auto& loss : plan_.reachability) {
      if (loss.vm == vm_id && (!tick || loss.from < *tick)) tick = loss.from;
    }
  }
  if (tick) {
    losses_[vm_id] = *tick;
    realized_losses_.push_back({vm_id, *tick});
  }
}

std::optional<Ticks> FaultSource::LossTick(const std::string& vm_id) const {
  if (auto it = losses_.find(vm_id); it != losses_.end()) return it->second;
  if (plan_.mode == FaultPlan::Mode::kScripted) {
    // Unregistered ids may still be scripted (e.g. queried before creation).
    std::optional<Ticks> tick;
    for (const auto& loss : plan_.reachability) {
      if (loss.vm == vm_id && (!tick || loss.from < *tick)) tick = loss.from;
    }
    return tick;
  }
  return std::nullopt;
}

std::size_t FaultSource::consumed(FaultKind kind) const { return cursor_[Index(kind)]; }

FaultPlan FaultSource::Realized() const {
  FaultPlan out;
  for (FaultKind kind : kAllFaultKinds) out.queue(kind) = drawn_[Index(kind)];
  out.reachability = realized_losses_;
  return out;
}

}  // namespace sconn
