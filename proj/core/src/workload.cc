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

#include "flexsched/workload.h"

#include <algorithm>
#include <cmath>

#include "flexsched/rng.h"

namespace flexsched {
namespace {

// One generator per sampled variable, so adding a variable never shifts the
// draws of the others.
enum Stream : std::uint64_t {
  kArrivalStream = 101,
  kClassStream,
  kRuntimeStream,
  kCpuStream,
  kRamStream,
  kCoreStream,
  kElasticStream,
};

void CheckMix(double a, double b, const char* what) {
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0 || std::abs(a + b - 1.0) > 1e-9) {
    throw InputError(std::string(what) + " fractions must lie in [0,1] and sum to 1");
  }
}

void CheckClass(const ClassDistributions& d, const char* name, bool needs_elastic) {
  auto need = [&](const EmpiricalDistribution& e, const char* field) {
    if (e.empty()) {
      throw InputError(std::string("workload class ") + name + " is missing the " +
                       field + " distribution");
    }
  };
  need(d.runtime, "runtime");
  need(d.cpu, "cpu");
  if (d.ram.empty() == d.ram_per_cpu.empty()) {
    throw InputError(std::string("workload class ") + name +
                     " needs exactly one of the ram and ram_per_cpu distributions");
  }
  need(d.n_core, "n_core");
  if (needs_elastic) need(d.n_elastic, "n_elastic");
  if (d.runtime.points().front().first <= 0.0) {
    throw InputError(std::string("workload class ") + name + " has non-positive runtimes");
  }
  if (d.n_core.points().front().first < 1.0) {
    throw InputError(std::string("workload class ") + name + " allows n_core < 1");
  }
  const EmpiricalDistribution& ram = d.ram.empty() ? d.ram_per_cpu : d.ram;
  if (d.cpu.points().front().first < 0.0 || ram.points().front().first < 0.0 ||
      (needs_elastic && d.n_elastic.points().front().first < 0.0)) {
    throw InputError(std::string("workload class ") + name + " has negative values");
  }
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw InputError("empirical distribution has no points");
  double prev_p = 0.0;
  double prev_v = points_.front().first;
  for (const auto& [v, p] : points_) {
    if (!std::isfinite(v) || !(p > prev_p)) {
      throw InputError("cumulative probabilities must be strictly increasing from above 0");
    }
    if (v < prev_v) throw InputError("distribution values must be non-decreasing");
    prev_p = p;
    prev_v = v;
  }
  if (points_.back().second != 1.0) {
    throw InputError("last cumulative probability must be exactly 1");
  }
}

double EmpiricalDistribution::Sample(double u) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), u,
                             [](const auto& point, double x) { return point.second < x; });
  if (it == points_.end()) return points_.back().first;
  return it->first;
}

double EmpiricalDistribution::Mean() const {
  double mean = 0.0;
  double prev = 0.0;
  for (const auto& [v, p] : points_) {
    mean += v * (p - prev);
    prev = p;
  }
  return mean;
}

void WorkloadSpec::Validate() const {
  if (n_apps < 0) throw InputError("n_apps must be non-negative");
  CheckMix(batch_fraction, interactive_fraction, "batch/interactive");
  CheckMix(elastic_fraction, rigid_fraction, "elastic/rigid");
  if (gaussian_arrivals) {
    if (!(gaussian_arrivals->stddev >= 0.0) || !std::isfinite(gaussian_arrivals->mean)) {
      throw InputError("gaussian arrivals need a finite mean and non-negative sigma");
    }
  } else if (inter_arrival.empty()) {
    throw InputError("workload needs an inter-arrival distribution");
  } else if (inter_arrival.points().front().first < 0.0) {
    throw InputError("inter-arrival times must be non-negative");
  }
  if (batch_fraction > 0.0) {
    if (elastic_fraction > 0.0) CheckClass(batch_elastic, "batch_elastic", true);
    if (rigid_fraction > 0.0) CheckClass(batch_rigid, "batch_rigid", false);
  }
  if (interactive_fraction > 0.0) CheckClass(interactive, "interactive", true);
  if (cluster) cluster->Validate();
}

ClusterSpec DefaultCluster() { return ClusterSpec{10, Resources{32.0, 131072.0}}; }

WorkloadSpec DefaultWorkloadSpec() {
  WorkloadSpec spec;
  spec.n_apps = 2000;
  spec.batch_fraction = 1.0;
  spec.interactive_fraction = 0.0;
  spec.elastic_fraction = 0.8;
  spec.rigid_fraction = 0.2;
  spec.seed = 1;
  spec.cluster = DefaultCluster();

  // Bursts of near-simultaneous submissions separated by long gaps.
  spec.inter_arrival = EmpiricalDistribution({{1, 0.30},
                                              {5, 0.45},
                                              {30, 0.55},
                                              {150, 0.70},
                                              {400, 0.85},
                                              {1200, 0.95},
                                              {2400, 1.0}});

  const EmpiricalDistribution cpu({{0.5, 0.20}, {1, 0.50}, {2, 0.75}, {4, 0.92}, {6, 1.0}});
  // Memory grows with the cores of a component, about 4 GB per core on
  // average like the cluster itself; 512 MB to 32 GB per component.
  const EmpiricalDistribution ram_per_cpu(
      {{1024, 0.10}, {2048, 0.25}, {4096, 0.60}, {5461, 1.0}});
  const EmpiricalDistribution batch_runtime({{60, 0.10},
                                             {300, 0.30},
                                             {900, 0.50},
                                             {1800, 0.65},
                                             {3600, 0.80},
                                             {7200, 0.90},
                                             {21600, 0.97},
                                             {86400, 1.0}});

  spec.batch_elastic.runtime = batch_runtime;
  spec.batch_elastic.cpu = cpu;
  spec.batch_elastic.ram_per_cpu = ram_per_cpu;
  spec.batch_elastic.n_core = EmpiricalDistribution({{2, 0.2}, {3, 0.8}, {4, 1.0}});
  spec.batch_elastic.n_elastic = EmpiricalDistribution(
      {{1, 0.15}, {2, 0.30}, {4, 0.50}, {8, 0.70}, {16, 0.85}, {32, 0.95}, {64, 1.0}});

  spec.batch_rigid.runtime = batch_runtime;
  spec.batch_rigid.cpu = cpu;
  spec.batch_rigid.ram_per_cpu = ram_per_cpu;
  spec.batch_rigid.n_core =
      EmpiricalDistribution({{1, 0.20}, {2, 0.40}, {4, 0.65}, {8, 0.85}, {16, 1.0}});

  spec.interactive.runtime =
      EmpiricalDistribution({{60, 0.2}, {300, 0.5}, {900, 0.8}, {3600, 1.0}});
  spec.interactive.cpu = cpu;
  spec.interactive.ram_per_cpu = ram_per_cpu;
  spec.interactive.n_core = EmpiricalDistribution({{1, 0.5}, {2, 1.0}});
  spec.interactive.n_elastic =
      EmpiricalDistribution({{0, 0.3}, {2, 0.6}, {8, 0.9}, {32, 1.0}});
  return spec;
}

std::vector<Request> Generate(const WorkloadSpec& spec) {
  spec.Validate();
  Pcg32 arrivals(spec.seed, kArrivalStream);
  Pcg32 classes(spec.seed, kClassStream);
  Pcg32 runtimes(spec.seed, kRuntimeStream);
  Pcg32 cpus(spec.seed, kCpuStream);
  Pcg32 rams(spec.seed, kRamStream);
  Pcg32 cores(spec.seed, kCoreStream);
  Pcg32 elastics(spec.seed, kElasticStream);

  std::vector<Request> out;
  out.reserve(static_cast<std::size_t>(spec.n_apps));
  double clock = 0.0;
  for (int i = 0; i < spec.n_apps; ++i) {
    if (i > 0) {
      const double gap = spec.gaussian_arrivals
                             ? arrivals.Normal(spec.gaussian_arrivals->mean,
                                               spec.gaussian_arrivals->stddev)
                             : spec.inter_arrival.Sample(arrivals.Uniform());
      clock += std::max(0.0, gap);
    }

    Request req;
    req.id = static_cast<RequestId>(i + 1);
    req.submit_time = clock;
    const ClassDistributions* dist = nullptr;
    if (classes.Uniform() < spec.interactive_fraction) {
      req.app_class = AppClass::kInteractive;
      req.priority_class = 1;
      dist = &spec.interactive;
    } else if (classes.Uniform() < spec.rigid_fraction) {
      req.app_class = AppClass::kBatchRigid;
      dist = &spec.batch_rigid;
    } else {
      req.app_class = AppClass::kBatchElastic;
      dist = &spec.batch_elastic;
    }

    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      req.nominal_runtime = dist->runtime.Sample(runtimes.Uniform());
      req.per_component.cpu = dist->cpu.Sample(cpus.Uniform());
      req.per_component.ram = dist->ram_per_cpu.empty()
                                  ? dist->ram.Sample(rams.Uniform())
                                  : req.per_component.cpu * dist->ram_per_cpu.Sample(rams.Uniform());
      req.n_core = static_cast<int>(std::llround(dist->n_core.Sample(cores.Uniform())));
      req.n_elastic =
          req.app_class == AppClass::kBatchRigid
              ? 0
              : static_cast<int>(std::llround(dist->n_elastic.Sample(elastics.Uniform())));
      if (!spec.cluster) {
        placed = true;
      } else {
        const Resources need = spec.fit_full_demand ? req.FullDemand() : req.CoreDemand();
        placed = Fits(need, spec.cluster->Total());
      }
    }
    if (!placed) {
      throw InputError("workload class " + std::string(ToString(req.app_class)) +
                       " produced no request that fits the cluster after 100 attempts");
    }
    ValidateRequest(req);
    out.push_back(req);
  }
  return out;
}

}  // namespace flexsched
