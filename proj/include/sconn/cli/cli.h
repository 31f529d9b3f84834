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

#ifndef SCONN_CLI_CLI_H_
#define SCONN_CLI_CLI_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sconn/cloud/fault_plan.h"
#include "sconn/core/types.h"

namespace sconn {

// Defaults stored in <store>/settings.json.
struct Settings {
  std::string provider_mode = "all_ok";  // all_ok | scripted | seeded
  std::string fault_plan;                // scripted plan path
  std::uint64_t seed = 0;                // seeded mode
  double rate = 0.1;                     // every seeded probability
  std::string destination;               // empty: <store>/transfers
  UserReqVM vms{1, 1};

  bool operator==(const Settings&) const = default;
};

Settings LoadSettings(const std::filesystem::path& store_root);
void SaveSettings(const std::filesystem::path& store_root, const Settings& s);

// Keys: provider.mode, provider.fault_plan, provider.seed, provider.rate,
// destination, vms. Throws kInvalidArgument for unknown keys or bad values.
std::string GetSetting(const Settings& s, const std::string& key);
void SetSetting(Settings& s, const std::string& key, const std::string& value);
std::vector<std::string> SettingKeys();

// "I:M" with 1 <= M <= I. Throws kInvalidArgument.
UserReqVM ParseVms(const std::string& text);

// args excludes the program name. Exit codes: 0 ok, 1 domain error,
// 2 usage error.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sconn

#endif  // SCONN_CLI_CLI_H_
