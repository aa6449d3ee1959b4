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

// Event-driven schedulers. Each one reacts to request arrivals and
// departures and produces a virtual Assignment over an aggregate resource
// pool:
//
//  - FlexibleScheduler admits a request as soon as its core components fit,
//    then hands out elastic components in policy order, reclaiming them from
//    running requests when needed. With preemption enabled, an arrival of a
//    higher priority class than the last request in service may take
//    resources held by elastic components right away.
//  - RigidScheduler gives every request all of its components at once and
//    serves the waiting line strictly in order (no backfilling).
//  - MalleableScheduler gives the head of the line as much as possible, then
//    the next one, and never shrinks a running request's grant.

#ifndef FLEXSCHED_SCHEDULER_H
#define FLEXSCHED_SCHEDULER_H

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flexsched/domain.h"
#include "flexsched/policy.h"

namespace flexsched {

enum class SchedulerKind { kFlexible, kRigid, kMalleable };

std::string_view ToString(SchedulerKind kind);
SchedulerKind ParseSchedulerKind(std::string_view name);

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::kFlexible;
  PolicyId policy;
  bool preemption = false;

  // e.g. "flexible-preempt/srpt1-1d".
  std::string Label() const;
};

struct Job {
  Request request;
  RunState run;
};

struct SchedulerState {
  ClusterSpec cluster;
  PolicyId policy;
  bool preemption = false;

  // Every known, unfinished and non-rejected request.
  std::unordered_map<RequestId, Job> jobs;
  // S, L and W. Kept in policy order as of the last event.
  std::vector<RequestId> serving;
  std::vector<RequestId> waiting;
  std::vector<RequestId> priority_waiting;

  Assignment assignment;
  Resources free;

  const Job& job(RequestId id) const;
  Job& job(RequestId id);
};

class Scheduler {
 public:
  Scheduler(const SchedulerConfig& config, const ClusterSpec& cluster);
  virtual ~Scheduler() = default;

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  // Registers a new request and reschedules. Throws InputError for a
  // duplicate id and RejectedRequest when the request can never fit.
  const Assignment& OnArrival(const Request& req, double now);

  // Removes a completed serving request and reassigns what it held. Throws
  // InvariantViolation if `id` is not serving or has work left.
  const Assignment& OnDeparture(RequestId id, double now);

  const SchedulerConfig& config() const { return config_; }
  const SchedulerState& state() const { return state_; }
  // Progress integration is the engine's job; it needs write access to the
  // RunStates of serving requests.
  SchedulerState& mutable_state() { return state_; }

  // Throws InvariantViolation if any structural invariant is broken.
  void CheckInvariants() const;

 protected:
  // The smallest demand that must fit the cluster for `req` to ever run.
  virtual Resources MinimumFootprint(const Request& req) const;
  virtual void HandleArrival(RequestId id, double now) = 0;
  virtual void HandleDeparture(double now) = 0;

  void SortLine(std::vector<RequestId>& line, double now) const;
  SortKey KeyOf(RequestId id, double now) const;
  Resources CoreSum(const std::vector<RequestId>& ids) const;
  Resources FullSum(const std::vector<RequestId>& ids) const;
  // Moves `id` into the serving set, stamping its first start time.
  void Admit(RequestId id, double now);
  // Rebuilds assignment and free pool from the grants of serving requests.
  void RecomputeAssignment();

  SchedulerConfig config_;
  SchedulerState state_;
};

// Largest number of elastic components of `req`, at most n_elastic, whose
// combined demand fits `avail`.
int MaxElasticGrant(const Request& req, const Resources& avail);

class FlexibleScheduler : public Scheduler {
 public:
  using Scheduler::Scheduler;

  // Admission then grant phase; public for direct testing.
  void Rebalance(double now);

 protected:
  void HandleArrival(RequestId id, double now) override;
  void HandleDeparture(double now) override;
};

class RigidScheduler : public Scheduler {
 public:
  using Scheduler::Scheduler;

 protected:
  Resources MinimumFootprint(const Request& req) const override;
  void HandleArrival(RequestId id, double now) override;
  void HandleDeparture(double now) override;

 private:
  void AdmitFromHead(double now);
};

class MalleableScheduler : public Scheduler {
 public:
  using Scheduler::Scheduler;

 protected:
  void HandleArrival(RequestId id, double now) override;
  void HandleDeparture(double now) override;

 private:
  void GrowThenAdmit(double now);
};

// Throws InputError for invalid combinations (preemption without flexible).
std::unique_ptr<Scheduler> MakeScheduler(const SchedulerConfig& config,
                                         const ClusterSpec& cluster);

}  // namespace flexsched

#endif  // FLEXSCHED_SCHEDULER_H
