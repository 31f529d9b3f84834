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

#include "sconn/cli/cli.h"

#include <cstdlib>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "sconn/core/error.h"
#include "sconn/core/json_io.h"
#include "sconn/engine/engine.h"
#include "sconn/store/store.h"
#include "sconn/sweep/sweep.h"

namespace fs = std::filesystem;

namespace sconn {
namespace {

// Bad invocation as opposed to a failing operation.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path StoreRoot(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SC_STORE"); env && *env) return env;
  return "sc_store";
}

SCDefinition LoadDefinition(const std::string& path) {
  return ParseJson(ReadFile(path), "definition " + path).get<SCDefinition>();
}

ScalarMap LoadInput(const std::string& path) {
  const Json j = ParseJson(ReadFile(path), "input " + path);
  if (!j.is_object()) throw Error(ErrorCode::kParse, "input " + path + " is not an object");
  try {
    return j.get<ScalarMap>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "input " + path + ": " + e.what());
  }
}

UserReqVM VmsOrDefault(const std::string& flag, const Settings& s) {
  if (flag.empty()) return s.vms;
  try {
    return ParseVms(flag);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// Options shared by the job-running subcommands.
struct RunOptions {
  std::string def;
  std::string input;
  std::string vms;
  std::string fault_plan;
  std::optional<std::uint64_t> seed;
  std::string dest;

  void Add(CLI::App* cmd, bool with_dest) {
    cmd->add_option("--def", def, "SC definition (JSON)")->required();
    cmd->add_option("--input", input, "data input (JSON object)")->required();
    cmd->add_option("--vms", vms, "ideal:minimal VM counts");
    auto* plan = cmd->add_option("--fault-plan", fault_plan, "scripted or seeded fault plan");
    auto* s = cmd->add_option("--seed", seed, "seeded fault plan with the configured rate");
    plan->excludes(s);
    if (with_dest) cmd->add_option("--dest", dest, "transfer destination (path or file://)");
  }

  // Base plan; sweeps shift a seeded plan's seed by the job index.
  FaultPlan Plan(const Settings& s) const {
    if (!fault_plan.empty()) return LoadFaultPlan(fault_plan);
    SeededRates rates{s.rate, s.rate, s.rate, s.rate, s.rate, 16};
    if (seed) return FaultPlan::Seeded(*seed, rates);
    if (s.provider_mode == "scripted" && !s.fault_plan.empty()) return LoadFaultPlan(s.fault_plan);
    if (s.provider_mode == "seeded") return FaultPlan::Seeded(s.seed, rates);
    return FaultPlan::AllOk();
  }

  std::string Destination(const Settings& s, const fs::path& root) const {
    if (!dest.empty()) return dest;
    if (!s.destination.empty()) return s.destination;
    return (root / "transfers").string();
  }
};

void PrintStatus(const Job& job, std::ostream& out) {
  out << "job " << job.job_id << "\n";
  out << "name " << job.definition.name << "\n";
  out << "state " << DisplayName(job.state) << "\n";
  out << "outcome " << (job.outcome ? std::string(DisplayName(job.outcome->kind)) : "-") << "\n";
  if (job.outcome && !job.outcome->detail.empty()) out << "detail " << job.outcome->detail << "\n";
  out << "vms " << job.user_req_vm.ideal << ":" << job.user_req_vm.minimal << " acquired "
      << job.vm_pool.size() << "\n";
  for (const auto& [task, n] : job.iteration) out << "task " << task << " iterations " << n << "\n";
  if (job.data_output) {
    out << "records " << job.data_output->records.size()
        << (job.data_output->partial ? " partial" : "") << "\n";
  }
  if (job.receipt) {
    out << "destination " << job.receipt->destination_path << " files "
        << job.receipt->files.size() << "\n";
  }
  out << "events " << job.event_log.size() << " last_t " << job.event_log.last_time() << "\n";
}

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Settings LoadSettings(const fs::path& store_root) {
  Settings s;
  const fs::path p = store_root / "settings.json";
  std::error_code ec;
  if (!fs::exists(p, ec)) return s;
  const Json j = ParseJson(ReadFile(p), "settings.json");
  try {
    s.provider_mode = j.value("provider.mode", s.provider_mode);
    s.fault_plan = j.value("provider.fault_plan", s.fault_plan);
    s.seed = j.value("provider.seed", s.seed);
    s.rate = j.value("provider.rate", s.rate);
    s.destination = j.value("destination", s.destination);
    if (j.contains("vms")) s.vms = ParseVms(j["vms"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("settings.json: ") + e.what());
  }
  return s;
}

void SaveSettings(const fs::path& store_root, const Settings& s) {
  Json j;
  for (const auto& key : SettingKeys()) j[key] = GetSetting(s, key);
  j["provider.seed"] = s.seed;
  j["provider.rate"] = s.rate;
  WriteFileAtomic(store_root / "settings.json", j.dump(2) + "\n");
}

std::vector<std::string> SettingKeys() {
  return {"provider.mode", "provider.fault_plan", "provider.seed", "provider.rate", "destination",
          "vms"};
}

std::string GetSetting(const Settings& s, const std::string& key) {
  if (key == "provider.mode") return s.provider_mode;
  if (key == "provider.fault_plan") return s.fault_plan;
  if (key == "provider.seed") return std::to_string(s.seed);
  if (key == "provider.rate") return FormatNumber(s.rate);
  if (key == "destination") return s.destination;
  if (key == "vms") return std::to_string(s.vms.ideal) + ":" + std::to_string(s.vms.minimal);
  throw Error(ErrorCode::kInvalidArgument, "unknown setting '" + key + "'");
}

void SetSetting(Settings& s, const std::string& key, const std::string& value) {
  auto bad = [&] { return Error(ErrorCode::kInvalidArgument, "bad value for " + key); };
  if (key == "provider.mode") {
    if (value != "all_ok" && value != "scripted" && value != "seeded") throw bad();
    s.provider_mode = value;
  } else if (key == "provider.fault_plan") {
    s.fault_plan = value;
  } else if (key == "provider.seed") {
    try {
      std::size_t used = 0;
      s.seed = std::stoull(value, &used);
      if (used != value.size()) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  } else if (key == "provider.rate") {
    try {
      std::size_t used = 0;
      const double r = std::stod(value, &used);
      if (used != value.size() || !(r >= 0.0 && r <= 1.0)) throw bad();
      s.rate = r;
    } catch (const std::logic_error&) {
      throw bad();
    }
  } else if (key == "destination") {
    s.destination = value;
  } else if (key == "vms") {
    s.vms = ParseVms(value);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown setting '" + key + "'");
  }
}

UserReqVM ParseVms(const std::string& text) {
  const auto colon = text.find(':');
  auto bad = [&] { return Error(ErrorCode::kInvalidArgument, "--vms expects I:M, got '" + text + "'"); };
  if (colon == std::string::npos) throw bad();
  UserReqVM req;
  try {
    std::size_t a = 0, b = 0;
    const std::string lhs = text.substr(0, colon), rhs = text.substr(colon + 1);
    req.ideal = std::stoi(lhs, &a);
    req.minimal = std::stoi(rhs, &b);
    if (a != lhs.size() || b != rhs.size()) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (!req.valid()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--vms " + text + ": need 1 <= minimal <= ideal");
  }
  return req;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sc: run smart connector jobs against a local store", "sc"};
  app.require_subcommand(1);
  std::string store_flag;
  app.add_option("--store", store_flag, "job store root (default $SC_STORE or ./sc_store)");

  // job
  auto* job = app.add_subcommand("job", "create, list and inspect jobs");
  job->require_subcommand(1);
  RunOptions create_opts;
  auto* create = job->add_subcommand("create", "create a job and run it to completion");
  create_opts.Add(create, true);
  auto* list = job->add_subcommand("list", "list jobs with their state");
  std::string status_id;
  bool status_events = false;
  auto* status = job->add_subcommand("status", "show a job's persisted status");
  status->add_option("id", status_id, "job id")->required();
  status->add_flag("--events", status_events, "print the event log");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
  sweep->require_subcommand(1);
  RunOptions sweep_opts;
  auto* sweep_run = sweep->add_subcommand("run", "launch one job per sweep binding");
  sweep_opts.Add(sweep_run, true);

  // replay
  RunOptions replay_opts;
  auto* replay_cmd = app.add_subcommand("replay", "dry-run a job and print its event log");
  replay_opts.Add(replay_cmd, false);

  // export
  std::string export_job, export_sweep, export_metrics, export_out;
  bool metrics_given = false;
  auto* export_cmd = app.add_subcommand("export", "write plot data as CSV");
  auto* ej = export_cmd->add_option("--job", export_job, "job id");
  auto* es = export_cmd->add_option("--sweep", export_sweep, "sweep id");
  ej->excludes(es);
  export_cmd->add_option("--metrics", export_metrics, "comma-separated metric names")
      ->each([&](const std::string&) { metrics_given = true; });
  export_cmd->add_option("--out", export_out, "output CSV path")->required();

  // settings
  auto* settings = app.add_subcommand("settings", "read or change defaults");
  settings->require_subcommand(1);
  std::string get_key;
  auto* get = settings->add_subcommand("get", "print one or all settings");
  get->add_option("key", get_key);
  std::string set_key, set_value;
  auto* set = settings->add_subcommand("set", "change a setting");
  set->add_option("key", set_key)->required();
  set->add_option("value", set_value)->required();

  std::vector<std::string> argv_store{"sc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path root = StoreRoot(store_flag);
    JobStore store(root);
    Settings s = LoadSettings(root);

    if (create->parsed()) {
      const UserReqVM req = VmsOrDefault(create_opts.vms, s);
      const SCDefinition def = LoadDefinition(create_opts.def);
      const ScalarMap input = LoadInput(create_opts.input);
      SimulatedRun run(create_opts.Plan(s));
      CurationIndex curation = store.Curation();
      run.env().curation = &curation;
      Job j = start_job(def, input, req, create_opts.Destination(s, root), store);
      store.SaveJob(j);
      j = run_to_completion(std::move(j), run.env(), [&](const Job& x) { store.SaveJob(x); });
      out << j.job_id << "\n";
      out << DisplayName(j.state) << " " << DisplayName(j.outcome->kind) << "\n";
      return 0;
    }
    if (list->parsed()) {
      out << "JOB\tSTATE\tOUTCOME\n";
      for (const auto& id : store.ListJobIds()) {
        const Job j = store.LoadJob(id);
        out << id << "\t" << DisplayName(j.state) << "\t"
            << (j.outcome ? std::string(DisplayName(j.outcome->kind)) : "-") << "\n";
      }
      return 0;
    }
    if (status->parsed()) {
      const Job j = store.LoadJob(status_id);
      if (status_events) {
        out << EventLogToJsonl(j.event_log);
      } else {
        PrintStatus(j, out);
      }
      return 0;
    }
    if (sweep_run->parsed()) {
      const UserReqVM req = VmsOrDefault(sweep_opts.vms, s);
      const SCDefinition def = LoadDefinition(sweep_opts.def);
      const ScalarMap input = LoadInput(sweep_opts.input);
      const FaultPlan base = sweep_opts.Plan(s);
      EnvFactory factory = [&](std::size_t i) {
        FaultPlan plan = base;
        if (plan.mode == FaultPlan::Mode::kSeeded) plan.seed += i;
        return std::make_unique<SimulatedRun>(plan);
      };
      CurationIndex curation = store.Curation();
      SweepLaunch launch =
          launch_sweep(def, input, req, factory, store, sweep_opts.Destination(s, root),
                       &curation, [&](const Job& x) { store.SaveJob(x); });
      SweepRecord rec;
      rec.sweep_id = store.NextSweepId();
      rec.job_ids = launch.job_ids;
      for (const auto& b : launch.bindings) rec.bindings.push_back(b.values);
      store.SaveSweep(rec);
      out << rec.sweep_id << "\n";
      for (const auto& j : launch.jobs) {
        out << j.job_id << "\t" << DisplayName(j.outcome->kind) << "\n";
      }
      return 0;
    }
    if (replay_cmd->parsed()) {
      const UserReqVM req = VmsOrDefault(replay_opts.vms, s);
      const SCDefinition def = LoadDefinition(replay_opts.def);
      const ScalarMap input = LoadInput(replay_opts.input);
      out << EventLogToJsonl(replay(def, input, req, replay_opts.Plan(s)));
      return 0;
    }
    if (export_cmd->parsed()) {
      if (export_job.empty() == export_sweep.empty()) {
        throw UsageError("export needs exactly one of --job or --sweep");
      }
      if (!metrics_given) throw UsageError("export needs --metrics");
      std::vector<Job> jobs;
      if (!export_job.empty()) {
        jobs.push_back(store.LoadJob(export_job));
      } else {
        for (const auto& id : store.LoadSweep(export_sweep).job_ids) jobs.push_back(store.LoadJob(id));
      }
      const auto metrics = SplitCsv(export_metrics);
      WriteFileAtomic(export_out, export_plot_data(jobs, metrics));
      return 0;
    }
    if (get->parsed()) {
      if (!get_key.empty()) {
        out << GetSetting(s, get_key) << "\n";
      } else {
        for (const auto& key : SettingKeys()) out << key << " = " << GetSetting(s, key) << "\n";
      }
      return 0;
    }
    if (set->parsed()) {
      try {
        SetSetting(s, set_key, set_value);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      SaveSettings(root, s);
      return 0;
    }
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    err << "sc: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "sc: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "sc: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sconn
