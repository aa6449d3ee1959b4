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

#include "flexsched/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "flexsched/trace.h"

namespace flexsched {
namespace {

double WeightedQuantile(const std::vector<std::pair<double, double>>& sorted, double total,
                        double p) {
  const double target = p * total;
  double cum = 0.0;
  for (const auto& [v, w] : sorted) {
    cum += w;
    if (cum >= target - 1e-12 * total && w > 0.0) return v;
  }
  return sorted.back().first;
}

}  // namespace

std::vector<std::pair<std::string, double>> Statistics(const Summary& s) {
  return {{"count", static_cast<double>(s.count)},
          {"mean", s.mean},
          {"min", s.min},
          {"p5", s.p5},
          {"p25", s.p25},
          {"p50", s.p50},
          {"p75", s.p75},
          {"p95", s.p95},
          {"max", s.max}};
}

std::vector<AppMetrics> ComputeAppMetrics(const SimResult& result) {
  std::vector<AppMetrics> out;
  out.reserve(result.completed.size());
  for (const CompletionRecord& c : result.completed) {
    if (!std::isfinite(c.finish) || !std::isfinite(c.start) || c.start < c.submit - kEpsilon ||
        c.finish < c.start - kEpsilon) {
      throw InputError("request " + std::to_string(c.id) + " has an incomplete record");
    }
    AppMetrics m;
    m.id = c.id;
    m.app_class = c.app_class;
    m.submit = c.submit;
    m.start = c.start;
    m.finish = c.finish;
    m.queuing = c.start - c.submit;
    m.effective_runtime = c.finish - c.start;
    m.turnaround = m.queuing + m.effective_runtime;
    m.slowdown = m.effective_runtime / c.nominal_runtime;
    out.push_back(m);
  }
  return out;
}

std::vector<AppMetrics> ComputeAppMetrics(const SimResult& result,
                                          std::span<const Request> requests) {
  std::unordered_set<RequestId> done;
  for (const auto& c : result.completed) done.insert(c.id);
  for (const auto& r : result.rejected) done.insert(r.id);
  for (const Request& r : requests) {
    if (!done.contains(r.id)) {
      throw InputError("request " + std::to_string(r.id) + " never completed");
    }
  }
  return ComputeAppMetrics(result);
}

std::map<std::string, std::vector<AppMetrics>> GroupByClass(
    const std::vector<AppMetrics>& metrics) {
  std::map<std::string, std::vector<AppMetrics>> groups;
  for (const AppMetrics& m : metrics) groups[std::string(ShortLabel(m.app_class))].push_back(m);
  return groups;
}

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary Summarize(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw InputError("cannot summarize an empty sample");
  if (!weights.empty() && weights.size() != values.size()) {
    throw InputError("weights and values differ in length");
  }
  Summary s;
  s.count = values.size();
  if (weights.empty()) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
             static_cast<double>(sorted.size());
    s.min = sorted.front();
    s.max = sorted.back();
    s.p5 = Quantile(sorted, 0.05);
    s.p25 = Quantile(sorted, 0.25);
    s.p50 = Quantile(sorted, 0.50);
    s.p75 = Quantile(sorted, 0.75);
    s.p95 = Quantile(sorted, 0.95);
  } else {
    std::vector<std::pair<double, double>> sorted;
    sorted.reserve(values.size());
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (weights[i] < 0.0) throw InputError("negative weight");
      sorted.emplace_back(values[i], weights[i]);
      total += weights[i];
      weighted += values[i] * weights[i];
    }
    if (!(total > 0.0)) throw InputError("weights sum to zero");
    std::sort(sorted.begin(), sorted.end());
    s.mean = weighted / total;
    s.min = sorted.front().first;
    s.max = sorted.back().first;
    s.p5 = WeightedQuantile(sorted, total, 0.05);
    s.p25 = WeightedQuantile(sorted, total, 0.25);
    s.p50 = WeightedQuantile(sorted, total, 0.50);
    s.p75 = WeightedQuantile(sorted, total, 0.75);
    s.p95 = WeightedQuantile(sorted, total, 0.95);
  }
  // Rounding in the mean must not break min <= mean <= max.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

ClusterStats AllocationStats(const SimResult& result) {
  double first = std::numeric_limits<double>::infinity();
  for (const auto& c : result.completed) first = std::min(first, c.submit);
  ClusterStats stats;
  const auto& series = result.series;
  if (!std::isfinite(first) || series.empty()) {
    const double zero = 0.0;
    stats.cpu = stats.ram = stats.pending = stats.running = Summarize({&zero, 1});
    return stats;
  }

  std::vector<double> cpu, ram, pending, running, weights;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double begin = std::max(series[i].time, first);
    const double end = i + 1 < series.size() ? series[i + 1].time : result.makespan;
    if (end <= begin) continue;
    cpu.push_back(series[i].cpu_fraction);
    ram.push_back(series[i].ram_fraction);
    pending.push_back(series[i].pending);
    running.push_back(series[i].running);
    weights.push_back(end - begin);
  }
  if (weights.empty()) {
    // Everything happened at a single instant.
    const TimeSample& last = series.back();
    cpu = {last.cpu_fraction};
    ram = {last.ram_fraction};
    pending = {static_cast<double>(last.pending)};
    running = {static_cast<double>(last.running)};
    weights = {1.0};
  }
  stats.cpu = Summarize(cpu, weights);
  stats.ram = Summarize(ram, weights);
  stats.pending = Summarize(pending, weights);
  stats.running = Summarize(running, weights);
  return stats;
}

std::vector<Ratio> Compare(const Summary& base, const Summary& other) {
  std::vector<Ratio> out;
  const auto a = Statistics(base);
  const auto b = Statistics(other);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Ratio r{a[i].first, a[i].second, b[i].second, 0.0};
    if (r.base != 0.0) {
      r.ratio = r.other / r.base;
    } else {
      r.ratio = r.other == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    out.push_back(r);
  }
  return out;
}

void WriteAppMetricsCsv(std::ostream& out, const std::vector<AppMetrics>& metrics) {
  out << "id,class,submit_time_s,start_time_s,finish_time_s,turnaround_s,queuing_s,slowdown\n";
  for (const AppMetrics& m : metrics) {
    out << m.id << ',' << ToString(m.app_class) << ',' << FormatNumber(m.submit) << ','
        << FormatNumber(m.start) << ',' << FormatNumber(m.finish) << ','
        << FormatNumber(m.turnaround) << ',' << FormatNumber(m.queuing) << ','
        << FormatNumber(m.slowdown) << '\n';
  }
}

void WriteTimeSeriesCsv(std::ostream& out, const std::vector<TimeSample>& series) {
  out << "time_s,cpu_fraction,ram_fraction,pending,running\n";
  for (const TimeSample& s : series) {
    out << FormatNumber(s.time) << ',' << FormatNumber(s.cpu_fraction) << ','
        << FormatNumber(s.ram_fraction) << ',' << s.pending << ',' << s.running << '\n';
  }
}

}  // namespace flexsched
