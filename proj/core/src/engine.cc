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

#include "flexsched/engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

namespace flexsched {
namespace {

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const { return EventBefore(b, a); }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, EventAfter>;

}  // namespace

bool EventBefore(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.sequence < b.sequence;
}

double WorkTolerance(double total_work, int rate, double now) {
  // Absolute 1e-9 on small instances; grows with the magnitudes involved so
  // that long simulated horizons do not trip on rounding.
  constexpr double kUlp = std::numeric_limits<double>::epsilon();
  return kEpsilon * std::max(1.0, total_work) +
         16.0 * kUlp * static_cast<double>(rate) * std::max(1.0, std::abs(now));
}

void AdvanceProgress(const Request& req, RunState& run, double to) {
  const double dt = to - run.last_update;
  if (dt < -kEpsilon) {
    throw InvariantViolation("progress of request " + std::to_string(req.id) +
                             " advanced backwards in time");
  }
  if (dt > 0.0) {
    const int rate = ProgressRate(req, run);
    run.progress += static_cast<double>(rate) * dt;
    const double over = run.progress - run.total_work;
    if (over > WorkTolerance(run.total_work, rate, to)) {
      throw InvariantViolation("request " + std::to_string(req.id) +
                               " overran its work by " + std::to_string(over));
    }
    run.progress = std::min(run.progress, run.total_work);
  }
  run.last_update = std::max(run.last_update, to);
}

double NextDeparture(const Request& req, const RunState& run, double now) {
  const int rate = ProgressRate(req, run);
  return now + std::max(0.0, run.RemainingWork()) / static_cast<double>(rate);
}

SimResult Run(std::span<const Request> requests, const SchedulerConfig& config,
              const ClusterSpec& cluster, const EngineOptions& options) {
  auto scheduler = MakeScheduler(config, cluster);
  SimResult result;
  result.meta.scheduler = config;
  result.meta.cluster = cluster;

  EventQueue queue;
  std::uint64_t sequence = 0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    queue.push(Event{requests[i].submit_time, EventKind::kArrival,
                     static_cast<RequestId>(i), sequence++, 0});
  }

  // Grant each serving request's pending departure was computed for.
  std::unordered_map<RequestId, int> scheduled_grant;
  std::unordered_map<RequestId, std::uint64_t> version;

  const Resources total = cluster.Total();
  result.series.push_back(TimeSample{});

  SchedulerState& state = scheduler->mutable_state();
  while (!queue.empty()) {
    Event ev = queue.top();
    queue.pop();
    if (ev.kind == EventKind::kDeparture) {
      auto it = version.find(ev.request_id);
      if (it == version.end() || it->second != ev.version) continue;
    }

    const double now = ev.time;
    for (RequestId id : state.serving) {
      Job& j = state.job(id);
      AdvanceProgress(j.request, j.run, now);
    }

    if (ev.kind == EventKind::kArrival) {
      // Arrival events carry the input index; the real id lives in the request.
      const Request& req = requests[ev.request_id];
      ev.request_id = req.id;
      try {
        scheduler->OnArrival(req, now);
      } catch (const RejectedRequest& e) {
        result.rejected.push_back(RejectionRecord{e.id(), e.what()});
      }
    } else {
      Job& j = state.job(ev.request_id);
      const int rate = ProgressRate(j.request, j.run);
      if (std::abs(j.run.RemainingWork()) >
          WorkTolerance(j.run.total_work, rate, now)) {
        throw InvariantViolation("request " + std::to_string(ev.request_id) +
                                 " departed with work left");
      }
      const double residual = j.run.RemainingWork();
      j.run.progress = j.run.total_work;
      j.run.finish_time = now;
      result.completed.push_back(CompletionRecord{
          j.request.id, j.request.app_class, j.request.n_core, j.request.n_elastic,
          j.request.nominal_runtime, j.request.submit_time, *j.run.start_time, now,
          residual});
      scheduler->OnDeparture(ev.request_id, now);
      scheduled_grant.erase(ev.request_id);
      version.erase(ev.request_id);
    }

    for (RequestId id : state.serving) {
      const Job& j = state.job(id);
      auto it = scheduled_grant.find(id);
      if (it != scheduled_grant.end() && it->second == j.run.granted_elastic) continue;
      scheduled_grant[id] = j.run.granted_elastic;
      const std::uint64_t v = ++version[id];
      queue.push(Event{NextDeparture(j.request, j.run, now), EventKind::kDeparture, id,
                       sequence++, v});
    }

    TimeSample sample{now, state.assignment.allocated.cpu / total.cpu,
                      state.assignment.allocated.ram / total.ram,
                      static_cast<int>(state.waiting.size() + state.priority_waiting.size()),
                      static_cast<int>(state.serving.size())};
    if (result.series.back().time == now) {
      result.series.back() = sample;
    } else {
      result.series.push_back(sample);
    }
    result.makespan = now;

    if (options.check_invariants) scheduler->CheckInvariants();
    if (options.observer) options.observer(*scheduler, ev);
  }

  if (!state.jobs.empty()) {
    RequestId blocked = state.waiting.empty()
                            ? (state.priority_waiting.empty() ? state.jobs.begin()->first
                                                              : state.priority_waiting.front())
                            : state.waiting.front();
    throw SimulationError("no progress possible: request " + std::to_string(blocked) +
                          " is blocked with " + std::to_string(state.jobs.size()) +
                          " requests unfinished");
  }

  std::sort(result.completed.begin(), result.completed.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return result;
}

}  // namespace flexsched
