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

#include "sconn/store/store.h"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sconn/core/error.h"
#include "sconn/core/json_io.h"

namespace fs = std::filesystem;

namespace sconn {
namespace {

constexpr std::string_view kReceiptFile = "receipt.json";

[[noreturn]] void IoFail(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::kIo, what + " " + path.string());
}

void WriteAll(int fd, std::string_view bytes, const fs::path& path) {
  while (!bytes.empty()) {
    const ssize_t n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      ::close(fd);
      IoFail("cannot write", path);
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string RecordLine(const OutputRecord& record) {
  Json j = record;
  j.erase("payload");
  return j.dump() + "\n";
}

std::string JobIdFor(int n, std::string_view prefix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*s-%06d", static_cast<int>(prefix.size()), prefix.data(), n);
  return buf;
}

// Highest N among entries named <prefix>-N[suffix] in dir.
int HighestId(const fs::path& dir, std::string_view prefix, std::string_view suffix) {
  int best = 0;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (!suffix.empty()) {
      if (name.size() <= suffix.size() || !name.ends_with(suffix)) continue;
      name.resize(name.size() - suffix.size());
    }
    if (name.size() <= prefix.size() + 1 || !name.starts_with(prefix) ||
        name[prefix.size()] != '-') {
      continue;
    }
    const std::string digits = name.substr(prefix.size() + 1);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    best = std::max(best, std::stoi(digits));
  }
  return best;
}

std::string CsvCell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

[[noreturn]] void Corrupt(const std::string& job_id, const std::string& what) {
  throw Error(ErrorCode::kCorruptRecord, "job " + job_id + ": " + what);
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) IoFail("cannot open", tmp);
  WriteAll(fd, bytes, tmp);
  if (::fsync(fd) != 0) {
    ::close(fd);
    IoFail("cannot sync", tmp);
  }
  ::close(fd);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) IoFail("cannot rename onto", path);
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) IoFail("cannot read", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RenderedFile> RenderOutputFiles(const DataOutput& output) {
  std::vector<RenderedFile> files;
  std::string records;
  for (const auto& r : output.records) {
    records += RecordLine(r);
    files.push_back(RenderedFile{r.payload_path, r.payload.dump(2) + "\n"});
  }
  files.push_back(RenderedFile{"records.jsonl", std::move(records)});
  std::sort(files.begin(), files.end(),
            [](const RenderedFile& a, const RenderedFile& b) { return IdLess{}(a.path, b.path); });
  return files;
}

fs::path ResolveDestination(const std::string& destination) {
  constexpr std::string_view kFile = "file://";
  if (destination.starts_with(kFile)) return fs::path(destination.substr(kFile.size()));
  const auto scheme = destination.find("://");
  if (scheme != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported destination scheme '" +
                                                 destination.substr(0, scheme) + "'");
  }
  if (destination.empty()) throw Error(ErrorCode::kInvalidArgument, "empty destination");
  return fs::path(destination);
}

TransferResult transfer_output(const DataOutput& output, const std::string& destination,
                               const std::string& job_id, FaultSource& faults, int retry_limit,
                               Ticks completed_at) {
  TransferFailed failed;
  for (int attempt = 1; attempt <= 1 + std::max(retry_limit, 0); ++attempt) {
    const PlanDraw draw = faults.Next(FaultKind::kTransfer);
    failed.attempts = attempt;
    if (draw.outcome == PlanOutcome::kFail) {
      failed.position = draw.position;
      continue;
    }
    TransferReceipt receipt;
    receipt.completed_at = completed_at;
    receipt.attempts = attempt;
    fs::path dir;
    if (!destination.empty()) {
      dir = ResolveDestination(destination) / job_id;
      receipt.destination_path = dir.string();
    }
    for (const auto& file : RenderOutputFiles(output)) {
      if (!destination.empty()) WriteFileAtomic(dir / file.path, file.bytes);
      receipt.files.push_back(ManifestEntry{file.path, file.bytes.size(), Sha256Hex(file.bytes)});
    }
    if (!destination.empty()) {
      WriteFileAtomic(dir / kReceiptFile, Json(receipt).dump(2) + "\n");
    }
    return receipt;
  }
  return failed;
}

std::vector<std::string> VerifyReceipt(const TransferReceipt& receipt) {
  std::vector<std::string> problems;
  const fs::path dir(receipt.destination_path);
  for (const auto& entry : receipt.files) {
    const fs::path p = dir / entry.path;
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
      problems.push_back(entry.path + ": missing");
      continue;
    }
    const std::string bytes = ReadFile(p);
    if (bytes.size() != entry.size) problems.push_back(entry.path + ": size mismatch");
    if (Sha256Hex(bytes) != entry.digest) problems.push_back(entry.path + ": digest mismatch");
  }
  return problems;
}

// ---------------------------------------------------------------------------

void to_json(Json& j, const DatasetRecord& v) {
  j = Json{{"dataset_id", v.dataset_id},
           {"job_id", v.job_id},
           {"parameters", v.parameters},
           {"metrics", v.metrics},
           {"files", v.files},
           {"processes", v.processes},
           {"partial", v.partial},
           {"failed_processes", v.failed_processes},
           {"created_at", v.created_at}};
}

void from_json(const Json& j, DatasetRecord& v) {
  try {
    v.dataset_id = j.at("dataset_id").get<std::string>();
    v.job_id = j.at("job_id").get<std::string>();
    v.parameters = j.at("parameters").get<ScalarMap>();
    v.metrics = j.at("metrics").get<std::map<std::string, double>>();
    v.files = j.at("files").get<std::vector<ManifestEntry>>();
    v.processes = j.at("processes").get<std::vector<std::string>>();
    v.partial = j.at("partial").get<bool>();
    v.failed_processes = j.at("failed_processes").get<std::vector<std::string>>();
    v.created_at = j.at("created_at").get<Ticks>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("dataset record: ") + e.what());
  }
}

CurationIndex::CurationIndex(fs::path path) : path_(std::move(path)) {}

std::vector<DatasetRecord> CurationIndex::Records() const {
  std::vector<DatasetRecord> out;
  std::error_code ec;
  if (!fs::exists(path_, ec)) return out;
  std::istringstream in(ReadFile(path_));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(ParseJson(line, "curation index").get<DatasetRecord>());
    } catch (const Error& e) {
      throw Error(ErrorCode::kCorruptRecord, path_.string() + ": " + e.what());
    }
  }
  return out;
}

DatasetRecord CurationIndex::Curate(const TransferReceipt& receipt, const Job& job,
                                    Ticks created_at) {
  for (const auto& existing : Records()) {
    if (existing.job_id == job.job_id) {
      throw Error(ErrorCode::kDuplicateDataset, "job " + job.job_id + " is already curated");
    }
  }
  DatasetRecord rec;
  rec.dataset_id = "ds-" + job.job_id;
  rec.job_id = job.job_id;
  rec.parameters = job.data_input;
  rec.files = receipt.files;
  rec.created_at = created_at;
  if (job.data_output) {
    std::set<std::string, IdLess> processes;
    for (const auto& r : job.data_output->records) {
      processes.insert(r.process);
      for (const auto& [name, value] : r.metrics) rec.metrics[name] = value;
    }
    rec.processes.assign(processes.begin(), processes.end());
    rec.partial = job.data_output->partial;
    rec.failed_processes = job.data_output->failed_processes;
  }

  std::error_code ec;
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path(), ec);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) IoFail("cannot open", path_);
  WriteAll(fd, Json(rec).dump() + "\n", path_);
  ::fsync(fd);
  ::close(fd);
  return rec;
}

// ---------------------------------------------------------------------------

std::string SequentialJobIds::NextJobId() { return JobIdFor(next_++, "job"); }

void to_json(Json& j, const SweepRecord& v) {
  j = Json{{"sweep_id", v.sweep_id}, {"job_ids", v.job_ids}, {"bindings", v.bindings}};
}

void from_json(const Json& j, SweepRecord& v) {
  try {
    v.sweep_id = j.at("sweep_id").get<std::string>();
    v.job_ids = j.at("job_ids").get<std::vector<std::string>>();
    v.bindings = j.at("bindings").get<std::vector<ScalarMap>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("sweep record: ") + e.what());
  }
}

JobStore::JobStore(fs::path root) : root_(std::move(root)) {}

fs::path JobStore::JobDir(const std::string& job_id) const { return root_ / "jobs" / job_id; }

std::string JobStore::NextJobId() {
  const fs::path jobs = root_ / "jobs";
  std::error_code ec;
  fs::create_directories(jobs, ec);
  if (ec) IoFail("cannot create", jobs);
  for (int n = HighestId(jobs, "job", "") + 1;; ++n) {
    const std::string id = JobIdFor(n, "job");
    if (fs::create_directory(jobs / id, ec)) return id;
    if (ec) IoFail("cannot create", jobs / id);
  }
}

void JobStore::SaveJob(const Job& job) {
  const fs::path dir = JobDir(job.job_id);
  const std::string definition = Json(job.definition).dump(2) + "\n";
  const std::string input = Json(job.data_input).dump(2) + "\n";
  const std::string events = EventLogToJsonl(job.event_log);

  Json record = job;
  record.erase("definition");
  record.erase("data_input");
  record.erase("event_log");
  Json files = Json::object();
  files["definition.json"] = Sha256Hex(definition);
  files["input.json"] = Sha256Hex(input);
  files["events.jsonl"] = Sha256Hex(events);

  WriteFileAtomic(dir / "definition.json", definition);
  WriteFileAtomic(dir / "input.json", input);
  WriteFileAtomic(dir / "events.jsonl", events);
  if (job.data_output) {
    std::string records;
    for (const auto& r : job.data_output->records) records += Json(r).dump() + "\n";
    record["data_output"].erase("records");
    files["output/records.jsonl"] = Sha256Hex(records);
    WriteFileAtomic(dir / "output" / "records.jsonl", records);
  }
  record["files"] = files;
  const Json status{{"sha256", Sha256Hex(record.dump())}, {"record", record}};
  WriteFileAtomic(dir / "status.json", status.dump(2) + "\n");
}

Job JobStore::LoadJob(const std::string& job_id) const {
  const fs::path dir = JobDir(job_id);
  std::error_code ec;
  if (job_id.empty() || job_id.find('/') != std::string::npos ||
      !fs::is_regular_file(dir / "status.json", ec)) {
    throw Error(ErrorCode::kUnknownJob, "unknown job '" + job_id + "'");
  }
  const std::string text = ReadFile(dir / "status.json");
  Json status;
  try {
    status = ParseJson(text, "status.json");
  } catch (const Error&) {
    Corrupt(job_id, "status.json does not parse");
  }
  if (status.dump(2) + "\n" != text) Corrupt(job_id, "status.json is not in canonical form");
  if (!status.is_object() || !status.contains("record") || !status.contains("sha256") ||
      !status["record"].is_object() || !status["record"].contains("files")) {
    Corrupt(job_id, "status.json lacks its envelope");
  }
  Json record = status["record"];
  if (Sha256Hex(record.dump()) != status["sha256"]) Corrupt(job_id, "status.json digest mismatch");

  const Json files = record["files"];
  auto read_checked = [&](const std::string& name) {
    if (!files.contains(name)) Corrupt(job_id, name + " is not listed");
    std::string bytes;
    try {
      bytes = ReadFile(dir / name);
    } catch (const Error&) {
      Corrupt(job_id, name + " is missing");
    }
    if (Sha256Hex(bytes) != files[name]) Corrupt(job_id, name + " digest mismatch");
    return bytes;
  };

  try {
    record.erase("files");
    record["definition"] = ParseJson(read_checked("definition.json"), "definition.json");
    record["data_input"] = ParseJson(read_checked("input.json"), "input.json");
    Job job = record.get<Job>();
    job.event_log = EventLogFromJsonl(read_checked("events.jsonl"));
    if (job.data_output) {
      std::istringstream in(read_checked("output/records.jsonl"));
      std::string line;
      while (std::getline(in, line)) {
        job.data_output->records.push_back(ParseJson(line, "records.jsonl").get<OutputRecord>());
      }
    }
    if (job.job_id != job_id) Corrupt(job_id, "record names job '" + job.job_id + "'");
    return job;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptRecord) throw;
    Corrupt(job_id, e.what());
  } catch (const nlohmann::json::exception& e) {
    Corrupt(job_id, e.what());
  }
}

std::vector<std::string> JobStore::ListJobIds() const {
  std::vector<std::string> ids;
  std::error_code ec;
  const fs::path jobs = root_ / "jobs";
  if (!fs::is_directory(jobs, ec)) return ids;
  for (const auto& entry : fs::directory_iterator(jobs)) {
    if (fs::is_regular_file(entry.path() / "status.json", ec)) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end(), IdLess{});
  return ids;
}

std::string JobStore::NextSweepId() {
  const fs::path sweeps = root_ / "sweeps";
  std::error_code ec;
  fs::create_directories(sweeps, ec);
  for (int n = HighestId(sweeps, "sweep", ".json") + 1;; ++n) {
    const std::string id = JobIdFor(n, "sweep");
    const fs::path p = sweeps / (id + ".json");
    const int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
    if (fd >= 0) {
      ::close(fd);
      return id;
    }
    if (errno != EEXIST) IoFail("cannot create", p);
  }
}

void JobStore::SaveSweep(const SweepRecord& sweep) {
  WriteFileAtomic(root_ / "sweeps" / (sweep.sweep_id + ".json"), Json(sweep).dump(2) + "\n");
}

SweepRecord JobStore::LoadSweep(const std::string& sweep_id) const {
  const fs::path p = root_ / "sweeps" / (sweep_id + ".json");
  std::error_code ec;
  if (sweep_id.find('/') != std::string::npos || !fs::is_regular_file(p, ec) ||
      fs::file_size(p, ec) == 0) {
    throw Error(ErrorCode::kUnknownJob, "unknown sweep '" + sweep_id + "'");
  }
  return ParseJson(ReadFile(p), "sweep record").get<SweepRecord>();
}

CurationIndex JobStore::Curation() const { return CurationIndex(root_ / "curation" / "index.jsonl"); }

// ---------------------------------------------------------------------------

std::string export_plot_data(std::span<const Job> jobs, std::span<const std::string> metrics) {
  for (const auto& m : metrics) {
    bool seen = false;
    for (const auto& job : jobs) {
      if (!job.data_output) continue;
      for (const auto& r : job.data_output->records) seen = seen || r.metrics.count(m) != 0;
    }
    if (!seen) throw Error(ErrorCode::kMissingMetric, "no record carries metric '" + m + "'");
  }
  std::set<std::string> variables;
  for (const auto& job : jobs) {
    for (const auto& [name, value] : job.sweep_binding) variables.insert(name);
  }

  std::string out = "job,task,process";
  for (const auto& v : variables) out += "," + CsvCell(v);
  out += ",iteration";
  for (const auto& m : metrics) out += "," + CsvCell(m);
  out += "\n";
  if (metrics.empty()) return out;

  for (const auto& job : jobs) {
    if (!job.data_output) continue;
    for (const auto& r : job.data_output->records) {
      out += CsvCell(job.job_id) + "," + std::to_string(r.task) + "," + CsvCell(r.process);
      for (const auto& v : variables) {
        auto it = job.sweep_binding.find(v);
        out += ",";
        if (it != job.sweep_binding.end()) out += CsvCell(ScalarToString(it->second));
      }
      out += "," + std::to_string(r.iteration);
      for (const auto& m : metrics) {
        auto it = r.metrics.find(m);
        out += ",";
        if (it != r.metrics.end()) out += FormatNumber(it->second);
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace sconn
