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

// Synthetic workloads sampled from empirical distributions.

#ifndef FLEXSCHED_WORKLOAD_H
#define FLEXSCHED_WORKLOAD_H

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexsched/domain.h"

namespace flexsched {

// Step-function CDF given as (value, cumulative probability) points.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  // Throws InputError unless probabilities strictly increase from above 0 to
  // exactly 1 and values never decrease.
  explicit EmpiricalDistribution(std::vector<std::pair<double, double>> points);

  // Smallest value whose cumulative probability is >= u.
  double Sample(double u) const;

  const std::vector<std::pair<double, double>>& points() const { return points_; }
  double Mean() const;
  double Max() const { return points_.back().first; }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<std::pair<double, double>> points_;
};

struct ClassDistributions {
  EmpiricalDistribution runtime;
  EmpiricalDistribution cpu;
  // Per-component RAM in MB. Set exactly one of the two: `ram` is sampled on
  // its own, `ram_per_cpu` (MB per core) is multiplied by the sampled cpu.
  EmpiricalDistribution ram;
  EmpiricalDistribution ram_per_cpu;
  EmpiricalDistribution n_core;
  EmpiricalDistribution n_elastic;
};

struct GaussianArrivals {
  double mean = 60.0;
  double stddev = 40.0;
};

struct WorkloadSpec {
  int n_apps = 0;
  double batch_fraction = 1.0;
  double interactive_fraction = 0.0;
  // Split of batch applications.
  double elastic_fraction = 0.8;
  double rigid_fraction = 0.2;

  EmpiricalDistribution inter_arrival;
  // Replaces inter_arrival when set. Negative draws become 0.
  std::optional<GaussianArrivals> gaussian_arrivals;

  ClassDistributions batch_elastic;
  ClassDistributions batch_rigid;  // n_elastic is ignored
  ClassDistributions interactive;

  std::uint64_t seed = 1;

  // When set, requests whose demand cannot fit are resampled.
  std::optional<ClusterSpec> cluster;
  // Resample until the whole request fits, not only its core components, so
  // that the rigid baseline can serve every request.
  bool fit_full_demand = true;

  void Validate() const;
};

// Batch-only desk workload: 2,000 applications, 80% elastic and 20% rigid,
// sized for a 10 x (32 cores, 128 GB) cluster.
WorkloadSpec DefaultWorkloadSpec();

// The desk cluster the default workload is sized for.
ClusterSpec DefaultCluster();

// Throws InputError when a class keeps producing requests that cannot fit
// after 100 attempts.
std::vector<Request> Generate(const WorkloadSpec& spec);

}  // namespace flexsched

#endif  // FLEXSCHED_WORKLOAD_H
