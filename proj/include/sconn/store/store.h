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

#ifndef SCONN_STORE_STORE_H_
#define SCONN_STORE_STORE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sconn/cloud/fault_plan.h"
#include "sconn/core/types.h"

namespace sconn {

// Lowercase hex SHA-256. The one digest used for receipts and job records.
std::string Sha256Hex(std::string_view bytes);

// Writes via a sibling temp file, fsync and rename. Throws kIo.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);  // throws kIo

// ---------------------------------------------------------------------------
// Output transfer

struct RenderedFile {
  std::string path;  // relative to the job's destination directory
  std::string bytes;
};

// records.jsonl plus one payload/<process>-it<iteration>.json per record,
// sorted by path.
std::vector<RenderedFile> RenderOutputFiles(const DataOutput& output);

// Accepts a plain path or a file:// URI; other schemes are not supported
// (remote copy is left to an adapter). Throws kInvalidArgument.
std::filesystem::path ResolveDestination(const std::string& destination);

struct TransferFailed {
  std::size_t position = 0;  // plan position of the last failed attempt
  int attempts = 0;
};

using TransferResult = std::variant<TransferReceipt, TransferFailed>;

// Each attempt consumes one transfer outcome. On Ok the files and a
// receipt.json are written under <destination>/<job_id>/. An empty
// destination is a dry run: digests are computed, nothing is written.
TransferResult transfer_output(const DataOutput& output, const std::string& destination,
                               const std::string& job_id, FaultSource& faults, int retry_limit,
                               Ticks completed_at);

// Problems found re-reading the manifest's files; empty when sound.
std::vector<std::string> VerifyReceipt(const TransferReceipt& receipt);

// ---------------------------------------------------------------------------
// Curation

struct DatasetRecord {
  std::string dataset_id;
  std::string job_id;
  ScalarMap parameters;  // data input, sweep binding included
  std::map<std::string, double> metrics;  // last value seen per metric
  std::vector<ManifestEntry> files;
  std::vector<std::string> processes;  // processes with at least one output
  bool partial = false;
  std::vector<std::string> failed_processes;
  Ticks created_at = 0;

  bool operator==(const DatasetRecord&) const = default;
};

void to_json(Json& j, const DatasetRecord& v);
void from_json(const Json& j, DatasetRecord& v);

// Append-only JSONL index. Records are never rewritten.
class CurationIndex {
 public:
  explicit CurationIndex(std::filesystem::path path);

  // Throws kDuplicateDataset if `job` was curated before.
  DatasetRecord Curate(const TransferReceipt& receipt, const Job& job, Ticks created_at);
  std::vector<DatasetRecord> Records() const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Job store

class JobIdSource {
 public:
  virtual ~JobIdSource() = default;
  virtual std::string NextJobId() = 0;
};

// "job-000001", "job-000002", ... held in memory.
class SequentialJobIds : public JobIdSource {
 public:
  std::string NextJobId() override;

 private:
  int next_ = 1;
};

struct SweepRecord {
  std::string sweep_id;
  std::vector<std::string> job_ids;
  std::vector<ScalarMap> bindings;

  bool operator==(const SweepRecord&) const = default;
};

void to_json(Json& j, const SweepRecord& v);
void from_json(const Json& j, SweepRecord& v);

// Layout under root:
//   jobs/<id>/{definition.json, input.json, events.jsonl,
//              output/records.jsonl, status.json}
//   curation/index.jsonl
//   sweeps/<sweep_id>.json
// status.json is written last and carries digests of its siblings, so a
// torn or edited record is reported as kCorruptRecord.
class JobStore : public JobIdSource {
 public:
  explicit JobStore(std::filesystem::path root);

  // Claims the next free id by creating its directory.
  std::string NextJobId() override;
  void SaveJob(const Job& job);
  Job LoadJob(const std::string& job_id) const;  // kUnknownJob, kCorruptRecord
  std::vector<std::string> ListJobIds() const;   // IdLess order
  std::filesystem::path JobDir(const std::string& job_id) const;

  std::string NextSweepId();
  void SaveSweep(const SweepRecord& sweep);
  SweepRecord LoadSweep(const std::string& sweep_id) const;

  CurationIndex Curation() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

// ---------------------------------------------------------------------------
// Export

// Columns: job, task, process, <sweep variables sorted>, iteration,
// <metrics in the given order>. One row per output record. Throws
// kMissingMetric for a metric no record carries.
std::string export_plot_data(std::span<const Job> jobs, std::span<const std::string> metrics);

}  // namespace sconn

#endif  // SCONN_STORE_STORE_H_
