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

#include <gtest/gtest.h>

#include <fstream>

#include "../support/small_sc.h"
#include "sconn/core/error.h"
#include "sconn/engine/engine.h"
#include "sconn/store/store.h"

namespace sconn {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("sconn-store-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kContractViolation;
}

DataOutput TwoRecords() {
  DataOutput out;
  OutputRecord a;
  a.process = "t1.p1";
  a.iteration = 1;
  a.metrics = {{"x", 4.0}};
  a.payload = Json{{"x", 4.0}};
  a.payload_path = "payload/t1.p1-it1.json";
  OutputRecord b = a;
  b.payload_path = "payload/t1.p1-it2.json";
  b.iteration = 2;
  b.metrics = {{"x", 2.0}};
  b.payload = Json{{"x", 2.0}};
  out.records = {a, b};
  return out;
}

FaultSource Transfers(std::vector<PlanOutcome> outcomes) {
  FaultPlan plan;
  plan.transfer = std::move(outcomes);
  return FaultSource(plan);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(ResolveDestination, PathsAndUris) {
  EXPECT_EQ(ResolveDestination("/tmp/out"), fs::path("/tmp/out"));
  EXPECT_EQ(ResolveDestination("file:///tmp/out"), fs::path("/tmp/out"));
  EXPECT_EQ(CodeOf([] { ResolveDestination("s3://bucket/x"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { ResolveDestination(""); }), ErrorCode::kInvalidArgument);
}

TEST(Transfer, OkWritesFilesAndReceipt) {
  TempDir dir;
  auto faults = Transfers({PlanOutcome::kOk});
  const auto r = transfer_output(TwoRecords(), dir.path().string(), "job-000001", faults, 1, 9);
  ASSERT_TRUE(std::holds_alternative<TransferReceipt>(r));
  const auto& receipt = std::get<TransferReceipt>(r);
  EXPECT_EQ(receipt.attempts, 1);
  EXPECT_EQ(receipt.completed_at, 9);
  ASSERT_EQ(receipt.files.size(), 3u);
  for (const auto& f : receipt.files) {
    const std::string bytes = ReadFile(fs::path(receipt.destination_path) / f.path);
    EXPECT_EQ(Sha256Hex(bytes), f.digest);
    EXPECT_EQ(bytes.size(), f.size);
  }
  EXPECT_TRUE(fs::exists(dir.path() / "job-000001" / "receipt.json"));
  EXPECT_TRUE(VerifyReceipt(receipt).empty());
}

TEST(Transfer, RetryThenSucceed) {
  TempDir dir;
  auto faults = Transfers({PlanOutcome::kFail, PlanOutcome::kOk});
  const auto r = transfer_output(TwoRecords(), dir.path().string(), "job-000001", faults, 1, 3);
  ASSERT_TRUE(std::holds_alternative<TransferReceipt>(r));
  EXPECT_EQ(std::get<TransferReceipt>(r).attempts, 2);
}

TEST(Transfer, ExhaustedWritesNothing) {
  TempDir dir;
  auto faults = Transfers({PlanOutcome::kFail, PlanOutcome::kFail});
  const auto r = transfer_output(TwoRecords(), dir.path().string(), "job-000001", faults, 1, 3);
  ASSERT_TRUE(std::holds_alternative<TransferFailed>(r));
  EXPECT_EQ(std::get<TransferFailed>(r).attempts, 2);
  EXPECT_EQ(std::get<TransferFailed>(r).position, 1u);
  EXPECT_FALSE(fs::exists(dir.path() / "job-000001" / "receipt.json"));
}

TEST(Transfer, DryRunMatchesWrittenDigests) {
  TempDir dir;
  auto f1 = Transfers({});
  auto f2 = Transfers({});
  const auto wet = std::get<TransferReceipt>(
      transfer_output(TwoRecords(), dir.path().string(), "job-000001", f1, 1, 3));
  const auto dry = std::get<TransferReceipt>(transfer_output(TwoRecords(), "", "job-000001", f2, 1, 3));
  EXPECT_EQ(wet.files, dry.files);
}

TEST(VerifyReceipt, DetectsTampering) {
  TempDir dir;
  auto faults = Transfers({});
  const auto receipt = std::get<TransferReceipt>(
      transfer_output(TwoRecords(), dir.path().string(), "job-000001", faults, 1, 3));
  const fs::path target = fs::path(receipt.destination_path) / receipt.files[0].path;
  std::string bytes = ReadFile(target);
  bytes[0] ^= 0x01;
  WriteFileAtomic(target, bytes);
  EXPECT_EQ(VerifyReceipt(receipt).size(), 1u);
  fs::remove(target);
  EXPECT_EQ(VerifyReceipt(receipt).size(), 1u);
}

TEST(Curation, RecordsPartialAndRejectsDuplicates) {
  TempDir dir;
  auto r = testing::RunSmall(testing::LoseAt("vm-1", 5), FtStrategy::kAbandonAndCollect,
                             RetryStrategy::kBlock);
  ASSERT_EQ(r.job.outcome->kind, OutcomeKind::kSuccess);
  ASSERT_TRUE(r.job.receipt.has_value());
  CurationIndex index(dir.path() / "index.jsonl");
  const DatasetRecord rec = index.Curate(*r.job.receipt, r.job, 20);
  EXPECT_EQ(rec.dataset_id, "ds-" + r.job.job_id);
  EXPECT_TRUE(rec.partial);
  EXPECT_FALSE(rec.failed_processes.empty());
  EXPECT_EQ(index.Records(), std::vector<DatasetRecord>{rec});
  EXPECT_EQ(CodeOf([&] { index.Curate(*r.job.receipt, r.job, 21); }),
            ErrorCode::kDuplicateDataset);
  EXPECT_EQ(index.Records().size(), 1u);
}

TEST(Curation, EngineCuratesOnlySuccessfulJobs) {
  TempDir dir;
  CurationIndex index(dir.path() / "index.jsonl");
  for (const auto& plan : {FaultPlan::AllOk(), testing::FailAt(FaultKind::kTaskStep, 0)}) {
    SimulatedRun run(plan);
    run.env().curation = &index;
    SequentialJobIds ids;
    Job job = start_job(testing::SmallSc(FtStrategy::kAbandonAndCollect, RetryStrategy::kBlock),
                        testing::SmallInput(), testing::SmallReq(), "", ids);
    job.job_id += plan.task_step.empty() ? "a" : "b";
    run_to_completion(job, run.env());
  }
  const auto recs = index.Records();
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].job_id, "job-000001a");
}

TEST(JobStore, SaveLoadRoundTrip) {
  TempDir dir;
  JobStore store(dir.path());
  SimulatedRun run(FaultPlan::AllOk());
  Job job = start_job(testing::SmallSc(FtStrategy::kRerunElsewhere, RetryStrategy::kBlock),
                      testing::SmallInput(), testing::SmallReq(), "", store);
  job = run_to_completion(job, run.env());
  store.SaveJob(job);
  EXPECT_EQ(store.LoadJob(job.job_id), job);
  EXPECT_EQ(store.ListJobIds(), std::vector<std::string>{job.job_id});
  EXPECT_EQ(store.NextJobId(), "job-000002");
  // An id claimed but never saved does not list.
  EXPECT_EQ(store.ListJobIds().size(), 1u);
}

TEST(JobStore, UnknownJob) {
  TempDir dir;
  JobStore store(dir.path());
  EXPECT_EQ(CodeOf([&] { store.LoadJob("job-000042"); }), ErrorCode::kUnknownJob);
  EXPECT_EQ(CodeOf([&] { store.LoadSweep("sweep-000042"); }), ErrorCode::kUnknownJob);
}

TEST(JobStore, CorruptionIsReported) {
  TempDir dir;
  JobStore store(dir.path());
  SimulatedRun run(FaultPlan::AllOk());
  Job job = start_job(testing::SmallSc(FtStrategy::kRerunElsewhere, RetryStrategy::kBlock),
                      testing::SmallInput(), testing::SmallReq(), "", store);
  store.SaveJob(run_to_completion(job, run.env()));
  const fs::path jd = store.JobDir(job.job_id);
  for (const char* name : {"status.json", "events.jsonl", "definition.json", "input.json",
                           "output/records.jsonl"}) {
    const std::string orig = ReadFile(jd / name);
    std::string bad = orig;
    bad[bad.size() / 2] ^= 0x20;
    WriteFileAtomic(jd / name, bad);
    EXPECT_EQ(CodeOf([&] { store.LoadJob(job.job_id); }), ErrorCode::kCorruptRecord) << name;
    WriteFileAtomic(jd / name, orig.substr(0, orig.size() - 1));
    EXPECT_EQ(CodeOf([&] { store.LoadJob(job.job_id); }), ErrorCode::kCorruptRecord) << name;
    WriteFileAtomic(jd / name, orig);
    EXPECT_NO_THROW(store.LoadJob(job.job_id));
  }
}

TEST(JobStore, SweepRoundTrip) {
  TempDir dir;
  JobStore store(dir.path());
  SweepRecord s{store.NextSweepId(), {"job-000001", "job-000002"}, {{{"x0", 1.0}}, {{"x0", 2.0}}}};
  EXPECT_EQ(s.sweep_id, "sweep-000001");
  store.SaveSweep(s);
  EXPECT_EQ(store.LoadSweep(s.sweep_id), s);
  EXPECT_EQ(store.NextSweepId(), "sweep-000002");
}

TEST(Export, RowsAndColumns) {
  Job job;
  job.job_id = "job-000007";
  job.sweep_binding = {{"x0", 8.0}};
  job.data_output = TwoRecords();
  const std::vector<Job> jobs{job};
  const std::vector<std::string> metrics{"x"};
  EXPECT_EQ(export_plot_data(jobs, metrics),
            "job,task,process,x0,iteration,x\n"
            "job-000007,1,t1.p1,8,1,4\n"
            "job-000007,1,t1.p1,8,2,2\n");
  EXPECT_EQ(export_plot_data(jobs, {}), "job,task,process,x0,iteration\n");
  const std::vector<std::string> missing{"y"};
  EXPECT_EQ(CodeOf([&] { export_plot_data(jobs, missing); }), ErrorCode::kMissingMetric);
}

TEST(Export, QuotesCellsThatNeedIt) {
  Job job;
  job.job_id = "job-000001";
  job.sweep_binding = {{"label", std::string("a,b")}};
  job.data_output = TwoRecords();
  job.data_output->records.resize(1);
  const std::vector<Job> jobs{job};
  const std::vector<std::string> metrics{"x"};
  EXPECT_EQ(export_plot_data(jobs, metrics), "job,task,process,label,iteration,x\n"
                                             "job-000001,1,t1.p1,\"a,b\",1,4\n");
}

}  // namespace
}  // namespace sconn
