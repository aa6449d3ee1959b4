/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Experiment orchestration behind the flexsched command line: configuration
// files, workload generation, scheduler/policy/seed sweeps and reports.

#ifndef FLEXSCHED_TOOLS_EXPERIMENT_H
#define FLEXSCHED_TOOLS_EXPERIMENT_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flexsched/domain.h"
#include "flexsched/engine.h"
#include "flexsched/workload.h"
#include "json.hpp"

namespace flexsched::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitIoError = 1,
  kExitConfigError = 2,
  kExitSimulationError = 3,
};

struct ExperimentConfig {
  ClusterSpec cluster = DefaultCluster();
  // Exactly one of these drives the workload.
  std::optional<std::filesystem::path> trace;
  WorkloadSpec workload = DefaultWorkloadSpec();

  std::vector<SchedulerKind> schedulers{SchedulerKind::kFlexible};
  std::vector<PolicyId> policies{PolicyId{}};
  std::vector<bool> preemption{false};
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "results";
  // 0 means one worker per logical core.
  unsigned jobs = 0;

  // Throws InputError when the config cannot run.
  void Validate() const;
};

// Parses the JSON configuration schema documented in the README. Missing
// keys keep their defaults. Throws InputError.
ExperimentConfig ParseConfig(const nlohmann::json& doc,
                             const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);

WorkloadSpec ParseWorkloadSpec(const nlohmann::json& doc, WorkloadSpec base);
nlohmann::json WorkloadSpecToJson(const WorkloadSpec& spec);

// The requests of one seed: the trace if configured, else generated.
std::vector<Request> BuildWorkload(const ExperimentConfig& config, std::uint64_t seed);

struct CellSpec {
  SchedulerConfig scheduler;
  std::uint64_t seed = 0;

  // e.g. "flexible-preempt_srpt1-1d_seed3".
  std::string Name() const;
};

// Sweep cells in deterministic order: seed, scheduler, policy, preemption.
// Preemption is only paired with the flexible scheduler.
std::vector<CellSpec> ExpandCells(const ExperimentConfig& config);

struct CellOutcome {
  CellSpec cell;
  bool ok = false;
  std::string error;
  std::optional<SimResult> result;
  std::uint64_t workload_fingerprint = 0;
  std::size_t n_requests = 0;
};

// The structured summary written as summary.json.
nlohmann::json SummarizeCell(const CellSpec& cell, const SimResult& result,
                             std::uint64_t workload_fingerprint, std::size_t n_requests);

// Writes per_app.csv, timeseries.csv and summary.json under dir/<cell name>.
void WriteCell(const std::filesystem::path& dir, const CellOutcome& outcome);

// Runs every cell, in parallel when config.jobs != 1, and writes outputs.
std::vector<CellOutcome> RunSweep(const ExperimentConfig& config, bool write_outputs,
                                  std::ostream& log);

struct GenloadReport {
  std::size_t count = 0;
  std::size_t batch_elastic = 0;
  std::size_t batch_rigid = 0;
  std::size_t interactive = 0;
};
GenloadReport CmdGenload(const ExperimentConfig& config, std::uint64_t seed,
                         const std::filesystem::path& out_path, std::ostream& log);

// Exit code as documented in ExitCode.
int CmdSimulate(const ExperimentConfig& config, std::ostream& log);

// Compares summary.json files of result cells. `inputs` may name cell
// directories or a sweep directory holding them. Writes comparison.csv and
// table.csv into out_dir.
int CmdReport(const std::vector<std::filesystem::path>& inputs,
              const std::filesystem::path& out_dir, const std::string& baseline,
              std::ostream& log);

}  // namespace flexsched::tools

#endif  // FLEXSCHED_TOOLS_EXPERIMENT_H
