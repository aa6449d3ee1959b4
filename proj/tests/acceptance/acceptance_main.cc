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

// Acceptance suite. Prints one PASS/FAIL line per criterion with the
// measured values and exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flexsched/engine.h"
#include "flexsched/metrics.h"
#include "flexsched/trace.h"
#include "flexsched/workload.h"
#include "support/test_support.h"

namespace flexsched {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

SimResult RunFifo(const std::vector<Request>& reqs, SchedulerKind kind,
                  const ClusterSpec& cluster, const char* policy = "fifo",
                  bool preemption = false) {
  return Run(reqs, {kind, PolicyId::Parse(policy), preemption}, cluster);
}

std::vector<double> Turnarounds(const SimResult& r) {
  std::vector<double> out;
  for (const auto& m : ComputeAppMetrics(r)) out.push_back(m.turnaround);
  return out;
}

double Median(const std::vector<double>& v) { return Summarize(v).p50; }
double Mean(const std::vector<double>& v) { return Summarize(v).mean; }

std::vector<Request> DeskWorkload(std::uint64_t seed) {
  WorkloadSpec spec = DefaultWorkloadSpec();
  spec.seed = seed;
  return Generate(spec);
}

constexpr int kSeeds = 10;

Outcome FourRequestOracle() {
  const auto reqs = ReadTrace(testing::DataPath("four_request_example.csv"));
  const ClusterSpec cluster = testing::TenUnitCluster();
  const double rigid = Mean(Turnarounds(RunFifo(reqs, SchedulerKind::kRigid, cluster)));
  const double malleable = Mean(Turnarounds(RunFifo(reqs, SchedulerKind::kMalleable, cluster)));
  const auto flexible_run = RunFifo(reqs, SchedulerKind::kFlexible, cluster);
  const double flexible = Mean(Turnarounds(flexible_run));
  const double expected[] = {10, 14, 158.0 / 7, 192.0 / 7};
  bool finishes = flexible_run.completed.size() == 4;
  for (std::size_t i = 0; finishes && i < 4; ++i) {
    finishes = std::abs(flexible_run.completed[i].finish - expected[i]) <= 1e-6;
  }
  Outcome o;
  o.pass = std::abs(rigid - 25) <= 1e-6 && std::abs(malleable - 19.25) <= 1e-6 &&
           std::abs(flexible - 18.5) <= 1e-6 && finishes;
  o.detail = Format("mean turnaround rigid %.9g, malleable %.9g, flexible %.9g; flexible "
                    "finishes %s",
                    rigid, malleable, flexible, finishes ? "match" : "differ");
  return o;
}

Outcome InelasticEquivalence() {
  WorkloadSpec spec = DefaultWorkloadSpec();
  spec.n_apps = 1000;
  spec.elastic_fraction = 0.0;
  spec.rigid_fraction = 1.0;
  const auto reqs = Generate(spec);
  double worst = 0;
  std::size_t compared = 0;
  for (const char* policy : {"fifo", "sjf", "srpt", "hrrn"}) {
    const auto rigid = RunFifo(reqs, SchedulerKind::kRigid, DefaultCluster(), policy);
    const auto flexible = RunFifo(reqs, SchedulerKind::kFlexible, DefaultCluster(), policy);
    if (rigid.completed.size() != reqs.size() || flexible.completed.size() != reqs.size()) {
      return {false, Format("%s: not every request completed", policy)};
    }
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      worst = std::max({worst, std::abs(rigid.completed[i].start - flexible.completed[i].start),
                        std::abs(rigid.completed[i].finish - flexible.completed[i].finish)});
      ++compared;
    }
  }
  return {worst <= 1e-9, Format("%zu request/policy pairs, max |start or finish difference| = "
                                "%.3g s",
                                compared, worst)};
}

Outcome FlexibleVersusRigid() {
  std::vector<double> flexible_all, rigid_all;
  double cpu[2] = {0, 0}, ram[2] = {0, 0};
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto reqs = DeskWorkload(seed);
    const auto flexible = RunFifo(reqs, SchedulerKind::kFlexible, DefaultCluster());
    const auto rigid = RunFifo(reqs, SchedulerKind::kRigid, DefaultCluster());
    if (!rigid.rejected.empty() || !flexible.rejected.empty()) {
      return {false, Format("seed %d: requests rejected", seed)};
    }
    for (double t : Turnarounds(flexible)) flexible_all.push_back(t);
    for (double t : Turnarounds(rigid)) rigid_all.push_back(t);
    const ClusterStats fs = AllocationStats(flexible), rs = AllocationStats(rigid);
    cpu[0] += fs.cpu.mean / kSeeds;
    cpu[1] += rs.cpu.mean / kSeeds;
    ram[0] += fs.ram.mean / kSeeds;
    ram[1] += rs.ram.mean / kSeeds;
  }
  const double ratio = Median(flexible_all) / Median(rigid_all);
  Outcome o;
  o.pass = ratio <= 0.7 && cpu[0] >= cpu[1] && ram[0] >= ram[1];
  o.detail = Format("median turnaround flexible %.0f s vs rigid %.0f s (ratio %.3f); mean "
                    "allocation cpu %.3f vs %.3f (%+.1f%%), ram %.3f vs %.3f (%+.1f%%)",
                    Median(flexible_all), Median(rigid_all), ratio, cpu[0], cpu[1],
                    100 * (cpu[0] / cpu[1] - 1), ram[0], ram[1], 100 * (ram[0] / ram[1] - 1));
  return o;
}

Outcome PolicyOrdering() {
  const std::vector<std::string> variants{"sjf-2d",   "sjf-3d",   "srpt1-2d",
                                          "srpt1-3d", "srpt2-2d", "srpt2-3d"};
  int sjf_beats_fifo = 0, sjf3 = 0, srpt3 = 0;
  std::map<std::string, int> hrrn_worse;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto reqs = DeskWorkload(seed);
    auto turnarounds = [&](const std::string& policy) {
      return Turnarounds(RunFifo(reqs, SchedulerKind::kFlexible, DefaultCluster(),
                                 policy.c_str()));
    };
    sjf_beats_fifo += Median(turnarounds("sjf")) <= Median(turnarounds("fifo"));
    std::map<std::string, double> mean;
    for (const auto& v : variants) mean[v] = Mean(turnarounds(v));
    const double hrrn = Mean(turnarounds("hrrn-2d"));
    sjf3 += mean["sjf-3d"] <= mean["sjf-2d"];
    srpt3 += mean["srpt1-3d"] <= mean["srpt1-2d"];
    for (const auto& v : variants) hrrn_worse[v] += hrrn >= mean[v];
  }
  bool hrrn_ok = true;
  std::string hrrn_counts;
  for (const auto& v : variants) {
    hrrn_ok &= hrrn_worse[v] >= 8;
    hrrn_counts += Format(" %s %d/10", v.c_str(), hrrn_worse[v]);
  }
  Outcome o;
  o.pass = sjf_beats_fifo >= 8 && sjf3 >= 7 && srpt3 >= 7 && hrrn_ok;
  o.detail = Format("SJF<=FIFO median %d/10; SJF-3D<=SJF-2D mean %d/10; SRPT-3D1<=SRPT-2D1 "
                    "mean %d/10; HRRN-2D>=",
                    sjf_beats_fifo, sjf3, srpt3) +
             hrrn_counts;
  return o;
}

Outcome Preemption() {
  std::vector<double> interactive[2], batch[2];
  for (int seed = 1; seed <= kSeeds; ++seed) {
    WorkloadSpec spec = DefaultWorkloadSpec();
    spec.seed = seed;
    spec.batch_fraction = 0.8;
    spec.interactive_fraction = 0.2;
    const auto reqs = Generate(spec);
    for (int preempt = 0; preempt < 2; ++preempt) {
      const auto result =
          RunFifo(reqs, SchedulerKind::kFlexible, DefaultCluster(), "srpt1", preempt == 1);
      for (const auto& m : ComputeAppMetrics(result)) {
        (m.app_class == AppClass::kInteractive ? interactive : batch)[preempt].push_back(
            m.queuing);
      }
    }
  }
  const double int_off = Median(interactive[0]), int_on = Median(interactive[1]);
  const double batch_off = Median(batch[0]), batch_on = Median(batch[1]);
  const double batch_change =
      batch_off == batch_on ? 1.0
                            : std::max(batch_on, batch_off) / std::min(batch_on, batch_off);
  Outcome o;
  // Zero queuing without preemption would make the comparison vacuous.
  o.pass = int_off > 0 && int_on <= 0.1 * int_off && batch_change <= 2.0;
  o.detail = Format("median queuing interactive %.2f s with preemption vs %.2f s without; "
                    "batch %.1f s vs %.1f s (x%.3f)",
                    int_on, int_off, batch_on, batch_off, batch_change);
  return o;
}

std::string Serialize(const SimResult& r) {
  std::ostringstream out;
  WriteAppMetricsCsv(out, ComputeAppMetrics(r));
  WriteTimeSeriesCsv(out, r.series);
  for (const auto& rej : r.rejected) out << rej.id << ',' << rej.reason << '\n';
  return out.str();
}

Outcome InvariantSuite() {
  const ClusterSpec cluster = testing::TenUnitCluster();
  const Resources total = cluster.Total();
  const auto configs = testing::AllConfigs();
  std::size_t runs = 0, events = 0;
  double worst_residual = 0, worst_step = 0;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (first_failure.empty()) first_failure = what;
  };
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto reqs = testing::RandomSmallWorkload(seed, cluster, 50);
    for (const auto& config : configs) {
      const std::string where = Format("seed %llu %s", static_cast<unsigned long long>(seed),
                                       config.Label().c_str());
      EngineOptions options;
      options.check_invariants = true;
      options.observer = [&](const Scheduler& s, const Event&) {
        ++events;
        const SchedulerState& st = s.state();
        Resources held{0, 0};
        for (RequestId id : st.serving) {
          const Job& j = st.jobs.at(id);
          const int g = j.run.granted_elastic;
          if (g < 0 || g > j.request.n_elastic) fail(where + ": grant out of range");
          // Every serving request holds its cores plus the granted elastic part.
          held += j.request.CoreDemand() + j.request.ElasticDemand(g);
        }
        if (!Fits(held, total)) fail(where + ": capacity exceeded");
        if (std::abs(held.cpu - st.assignment.allocated.cpu) > 1e-9 ||
            std::abs(held.ram - st.assignment.allocated.ram) > 1e-9) {
          fail(where + ": assignment does not cover the serving cores");
        }
      };
      SimResult a;
      try {
        a = Run(reqs, config, cluster, options);
      } catch (const std::exception& e) {
        fail(where + ": " + e.what());
        continue;
      }
      ++runs;
      const SimResult b = Run(reqs, config, cluster);
      if (Serialize(a) != Serialize(b)) fail(where + ": reruns differ");
      if (a.completed.size() != reqs.size()) fail(where + ": not all requests completed");
      for (const auto& c : a.completed) {
        worst_residual = std::max(worst_residual, std::abs(c.residual_work));
      }
      const auto stepped = testing::SteppedFinishTimes(reqs, config, cluster, 1e-3);
      if (stepped.count(0)) {
        fail(where + ": stepper stalled");
        continue;
      }
      for (const auto& c : a.completed) {
        worst_step = std::max(worst_step, std::abs(c.finish - stepped.at(c.id)));
      }
    }
  }
  if (worst_residual > 1e-9) fail("residual work above 1e-9");
  if (worst_step > 1e-2) fail("stepper disagrees by more than 1e-2 s");
  Outcome o;
  o.pass = first_failure.empty();
  o.detail = Format("%zu runs, %zu events; max |residual work| %.3g; max |engine - stepper| "
                    "%.3g s",
                    runs, events, worst_residual, worst_step);
  if (!o.pass) o.detail += "; first failure: " + first_failure;
  return o;
}

struct Criterion {
  int number;
  const char* name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace flexsched

int main() {
  using namespace flexsched;
  const std::vector<Criterion> criteria{
      {1, "four-request oracle", 1.0, FourRequestOracle},
      {2, "inelastic equivalence", 5.0, InelasticEquivalence},
      {3, "flexible vs rigid", 120.0, FlexibleVersusRigid},
      {4, "policy ordering", 0.0, PolicyOrdering},
      {5, "preemption", 0.0, Preemption},
      {6, "invariant suite", 0.0, InvariantSuite},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += Format("; exceeded %.0f s limit", c.time_limit_s);
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.number,
                c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
