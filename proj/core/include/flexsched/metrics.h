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

// Evaluation metrics derived from a SimResult.
//
// Per application: turnaround (finish - submit), queuing (start - submit)
// and slowdown (effective runtime / nominal runtime, so 1 means no
// slowdown). Cluster level: time-weighted allocation and queue lengths.
//
// Unweighted quantiles interpolate linearly between order statistics at
// rank (n - 1) p. Weighted quantiles take the smallest value whose
// cumulative weight reaches p of the total.

#ifndef FLEXSCHED_METRICS_H
#define FLEXSCHED_METRICS_H

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "flexsched/domain.h"
#include "flexsched/engine.h"

namespace flexsched {

struct AppMetrics {
  RequestId id = 0;
  AppClass app_class = AppClass::kBatchElastic;
  double submit = 0.0;
  double start = 0.0;
  double finish = 0.0;
  double turnaround = 0.0;
  double queuing = 0.0;
  double effective_runtime = 0.0;
  double slowdown = 1.0;
};

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double p5 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// (name, value) pairs in report order: count, mean, min, p5 ... max.
std::vector<std::pair<std::string, double>> Statistics(const Summary& s);

// Throws InputError for records that are not complete and consistent.
std::vector<AppMetrics> ComputeAppMetrics(const SimResult& result);
// Also requires every request in `requests` to be completed or rejected.
std::vector<AppMetrics> ComputeAppMetrics(const SimResult& result,
                                          std::span<const Request> requests);

// Keyed by short class label (B-E, B-R, Int).
std::map<std::string, std::vector<AppMetrics>> GroupByClass(
    const std::vector<AppMetrics>& metrics);

// Throws InputError on empty input or mismatched weights.
Summary Summarize(std::span<const double> values, std::span<const double> weights = {});

double Quantile(std::span<const double> sorted, double p);

struct ClusterStats {
  Summary cpu;
  Summary ram;
  Summary pending;
  Summary running;
};

// Time-weighted over [first arrival, makespan].
ClusterStats AllocationStats(const SimResult& result);

struct Ratio {
  std::string statistic;
  double base = 0.0;
  double other = 0.0;
  double ratio = 0.0;  // other / base
};

std::vector<Ratio> Compare(const Summary& base, const Summary& other);

// id,class,submit_time_s,start_time_s,finish_time_s,turnaround_s,queuing_s,slowdown
void WriteAppMetricsCsv(std::ostream& out, const std::vector<AppMetrics>& metrics);
// time_s,cpu_fraction,ram_fraction,pending,running
void WriteTimeSeriesCsv(std::ostream& out, const std::vector<TimeSample>& series);

}  // namespace flexsched

#endif  // FLEXSCHED_METRICS_H
