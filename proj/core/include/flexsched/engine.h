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

// Trace-driven discrete-event simulation of one scheduler over one list of
// requests.
//
// The engine owns the clock and the event queue. Before every event it
// integrates progress of all serving requests at their current rate; after
// every event it looks at the new assignment and reschedules the departure
// of each request whose grant changed. Departures carry a version stamp, so
// an event scheduled under an older grant is recognised as stale and
// dropped.

#ifndef FLEXSCHED_ENGINE_H
#define FLEXSCHED_ENGINE_H

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexsched/domain.h"
#include "flexsched/scheduler.h"

namespace flexsched {

enum class EventKind { kDeparture = 0, kArrival = 1 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kArrival;
  RequestId request_id = 0;
  std::uint64_t sequence = 0;
  // Grant revision a departure was computed under.
  std::uint64_t version = 0;
};

// Strict weak order for a min-queue: time, then departures before arrivals,
// then insertion sequence.
bool EventBefore(const Event& a, const Event& b);

struct CompletionRecord {
  RequestId id = 0;
  AppClass app_class = AppClass::kBatchElastic;
  int n_core = 0;
  int n_elastic = 0;
  double nominal_runtime = 0.0;
  double submit = 0.0;
  double start = 0.0;
  double finish = 0.0;
  // total_work - progress when the departure fired, before snapping.
  double residual_work = 0.0;
};

struct RejectionRecord {
  RequestId id = 0;
  std::string reason;
};

// Cluster state right after the events at `time`; holds until the next
// sample.
struct TimeSample {
  double time = 0.0;
  double cpu_fraction = 0.0;
  double ram_fraction = 0.0;
  int pending = 0;
  int running = 0;
};

struct RunMetadata {
  std::optional<std::uint64_t> seed;
  SchedulerConfig scheduler;
  ClusterSpec cluster;
};

struct SimResult {
  RunMetadata meta;
  // Sorted by request id.
  std::vector<CompletionRecord> completed;
  std::vector<RejectionRecord> rejected;
  std::vector<TimeSample> series;
  double makespan = 0.0;
};

struct EngineOptions {
  // Run Scheduler::CheckInvariants after every event.
  bool check_invariants = false;
  // Called after every processed event.
  std::function<void(const Scheduler&, const Event&)> observer;
};

// Adds rate x (to - last_update) component-seconds to `run`. Throws
// InvariantViolation if progress would pass total_work beyond tolerance.
void AdvanceProgress(const Request& req, RunState& run, double to);

// Time at which `run` completes if its grant stays as it is.
double NextDeparture(const Request& req, const RunState& run, double now);

// Slack allowed between progress and total work at a departure.
double WorkTolerance(double total_work, int rate, double now);

SimResult Run(std::span<const Request> requests, const SchedulerConfig& config,
              const ClusterSpec& cluster, const EngineOptions& options = {});

}  // namespace flexsched

#endif  // FLEXSCHED_ENGINE_H
