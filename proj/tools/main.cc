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

// flexsched: generate workloads, run scheduler sweeps and compare results.
//
//   flexsched genload  --config cfg.json --out trace.csv [--seed N]
//   flexsched simulate --config cfg.json --out results/ [--scheduler S]...
//   flexsched report   results/ --out report/
//
// Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 simulation
// error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiment.h"

namespace {

using flexsched::InputError;
using namespace flexsched::tools;

struct CommonFlags {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> schedulers;
  std::vector<std::string> policies;
  std::vector<std::string> preemption;
  std::string trace;
  std::optional<int> n_apps;
  std::optional<unsigned> jobs;
};

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment configuration");
  cmd->add_option("--seed", f.seeds, "Workload seed (repeatable)");
  cmd->add_option("--scheduler", f.schedulers, "flexible | rigid | malleable (repeatable)");
  cmd->add_option("--policy", f.policies,
                  "fifo | sjf | srpt1 | srpt2 | hrrn, optionally -1d/-2d/-3d (repeatable)");
  cmd->add_option("--preemption", f.preemption, "on | off (repeatable)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--trace", f.trace, "Request trace CSV instead of a generated workload");
  cmd->add_option("--n-apps", f.n_apps, "Override the number of generated applications");
  cmd->add_option("--jobs", f.jobs, "Parallel simulations (default: logical cores)");
}

ExperimentConfig BuildConfig(const CommonFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : LoadConfig(f.config);
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  if (!f.schedulers.empty()) {
    cfg.schedulers.clear();
    for (const auto& s : f.schedulers) cfg.schedulers.push_back(flexsched::ParseSchedulerKind(s));
  }
  if (!f.policies.empty()) {
    cfg.policies.clear();
    for (const auto& p : f.policies) cfg.policies.push_back(flexsched::PolicyId::Parse(p));
  }
  if (!f.preemption.empty()) {
    cfg.preemption.clear();
    for (const auto& p : f.preemption) cfg.preemption.push_back(p == "on");
  }
  if (!f.trace.empty()) cfg.trace = f.trace;
  if (f.n_apps) cfg.workload.n_apps = *f.n_apps;
  if (f.jobs) cfg.jobs = *f.jobs;
  cfg.workload.cluster = cfg.cluster;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator for flexible scheduling of elastic applications"};
  app.require_subcommand(1);

  CommonFlags genload_flags;
  auto* genload = app.add_subcommand("genload", "Sample a workload and write a trace CSV");
  AddCommon(genload, genload_flags);
  genload->add_option("--out", genload_flags.out, "Output trace path")->required();

  CommonFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run a scheduler/policy/seed sweep");
  AddCommon(simulate, sim_flags);
  simulate->add_option("--out", sim_flags.out, "Output directory (overrides output_dir)");

  std::vector<std::string> report_inputs;
  std::string report_out = "report";
  std::string report_baseline;
  auto* report = app.add_subcommand("report", "Compare summaries of result cells");
  report->add_option("cells", report_inputs, "Cell directories or a sweep directory")
      ->required();
  report->add_option("--out", report_out, "Output directory for comparison tables");
  report->add_option("--baseline", report_baseline,
                     "Cell used as the ratio denominator (default: first rigid cell)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*genload) {
      ExperimentConfig cfg = BuildConfig(genload_flags);
      cfg.workload.Validate();
      const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
      CmdGenload(cfg, seed, genload_flags.out, std::cout);
      return kExitOk;
    }
    if (*simulate) {
      ExperimentConfig cfg = BuildConfig(sim_flags);
      if (!sim_flags.out.empty()) cfg.output_dir = sim_flags.out;
      return CmdSimulate(cfg, std::cout);
    }
    if (*report) {
      std::vector<std::filesystem::path> inputs(report_inputs.begin(), report_inputs.end());
      return CmdReport(inputs, report_out, report_baseline, std::cout);
    }
  } catch (const InputError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const flexsched::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return kExitSimulationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  }
  return kExitOk;
}
